#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace bdpo {

enum class OptimizerKind { sgd, adaptive_moments };

OptimizerKind optimizer_kind_from_string(std::string_view name);
std::string_view to_string(OptimizerKind kind);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::adaptive_moments;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  // Decoupled: params shrink by lr * weight_decay * param, outside the
  // moment estimates.
  double weight_decay = 0.0;
  friend bool operator==(const OptimizerConfig&, const OptimizerConfig&) = default;
};

struct OptimizerState {
  std::vector<double> m1;
  std::vector<double> m2;
  std::int64_t step = 0;
};

// One in-place update with the given effective learning rate.
// sgd:               p -= lr * g
// adaptive_moments:  m1 = b1 m1 + (1-b1) g;  m2 = b2 m2 + (1-b2) g^2
//                    mh = m1/(1-b1^t);       vh = m2/(1-b2^t)
//                    p -= lr * (mh / (sqrt(vh) + eps) + weight_decay * p)
void optimizer_step(std::span<double> params, std::span<const double> grad,
                    OptimizerState& state, const OptimizerConfig& cfg, double lr);

}  // namespace bdpo
