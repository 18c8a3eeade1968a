#include "bdpo/optim.hpp"

#include <cmath>
#include <string>

#include "bdpo/errors.hpp"

namespace bdpo {

OptimizerKind optimizer_kind_from_string(std::string_view name) {
  if (name == "sgd") return OptimizerKind::sgd;
  if (name == "adaptive_moments") return OptimizerKind::adaptive_moments;
  throw ValidationError("unknown optimizer '" + std::string(name) + "'");
}

std::string_view to_string(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::sgd: return "sgd";
    case OptimizerKind::adaptive_moments: return "adaptive_moments";
  }
  throw ValidationError("unknown optimizer value");
}

void optimizer_step(std::span<double> params, std::span<const double> grad,
                    OptimizerState& state, const OptimizerConfig& cfg, double lr) {
  if (params.size() != grad.size())
    throw ValidationError("optimizer_step: params/grad size mismatch");

  if (cfg.kind == OptimizerKind::sgd) {
    ++state.step;
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr * grad[i];
    return;
  }

  if (state.m1.empty()) {
    state.m1.assign(params.size(), 0.0);
    state.m2.assign(params.size(), 0.0);
  }
  if (state.m1.size() != params.size())
    throw ValidationError("optimizer_step: moment buffers sized for another model");

  ++state.step;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m1[i] = cfg.beta1 * state.m1[i] + (1.0 - cfg.beta1) * grad[i];
    state.m2[i] = cfg.beta2 * state.m2[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
    double mh = state.m1[i] / c1;
    double vh = state.m2[i] / c2;
    params[i] -= lr * (mh / (std::sqrt(vh) + cfg.eps) + cfg.weight_decay * params[i]);
  }
}

}  // namespace bdpo
