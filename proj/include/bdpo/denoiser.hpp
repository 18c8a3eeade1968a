#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bdpo/rng.hpp"
#include "bdpo/types.hpp"

namespace bdpo {

// Fixed feed-forward noise predictor: input is the concatenation of
// x_t (d), sinusoidal time features (2m), and a one-hot condition (C);
// two tanh hidden layers of width h; linear output of size d.
struct DenoiserConfig {
  int d = 2;
  int m = 4;
  int c = 4;
  int h = 64;

  int input_dim() const { return d + 2 * m + c; }
  std::size_t param_count() const;
  friend bool operator==(const DenoiserConfig&, const DenoiserConfig&) = default;
};

// Flat parameter vector in layer order w1, b1, w2, b2, w3, b3 with
// weight matrices row-major (one row per output unit).
struct DenoiserParams {
  DenoiserConfig cfg;
  std::vector<double> w;

  static DenoiserParams zeros(const DenoiserConfig& cfg);
  // Weights ~ N(0, 1/fan_in), biases zero; draws consumed in flat order.
  static DenoiserParams random_init(const DenoiserConfig& cfg, RngStream& rng);
  friend bool operator==(const DenoiserParams&, const DenoiserParams&) = default;
};

// Offsets of each block inside the flat vector.
struct ParamLayout {
  std::size_t w1, b1, w2, b2, w3, b3, total;
  explicit ParamLayout(const DenoiserConfig& cfg);
};

// Activations retained by a forward pass so the matching backward pass
// can run without recomputation. Reusable across calls.
struct DenoiserWorkspace {
  std::vector<double> input, a1, a2, out;
  std::vector<double> d1, d2;  // backprop scratch
};

// features[j] = sin(t * f_j) for j < m, then cos(t * f_j); f_j =
// exp(-ln(10000) * j / m) as in standard sinusoidal position encodings.
void time_features(int t, int m, std::span<double> out);

// Forward pass; out must have size d.
void denoise_into(const DenoiserParams& params, std::span<const double> x_t, int t,
                  const Condition& c, DenoiserWorkspace& ws, std::span<double> out);
std::vector<double> denoise(const DenoiserParams& params, std::span<const double> x_t, int t,
                            const Condition& c);

// Accumulates d(loss)/d(params) += backprop of d_out through the pass
// recorded in ws. grad must have param_count entries.
void denoise_backward(const DenoiserParams& params, DenoiserWorkspace& ws,
                      std::span<const double> d_out, std::span<double> grad);

}  // namespace bdpo
