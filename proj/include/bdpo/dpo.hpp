#pragma once

#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "bdpo/denoiser.hpp"
#include "bdpo/schedule.hpp"
#include "bdpo/types.hpp"

namespace bdpo {

// balanced trains on one consensus label per pair; vanilla trains on the
// per-metric votes. normalized/random/single relabel the data and then
// reuse the balanced loss — labels differ, not losses.
enum class LossMode { balanced, vanilla, normalized, random, single };

LossMode loss_mode_from_string(std::string_view name);
std::string_view to_string(LossMode mode);

struct DpoConfig {
  double beta = 1.0;
  LossMode loss_mode = LossMode::balanced;
  // Per-metric weights for the vanilla loss; empty means equal 1/K.
  std::vector<double> weights;
};

struct ModelPair {
  DenoiserParams theta;
  DenoiserParams ref;
};

// One pair's stochastic surrogate draw: a shared timestep plus injected
// noises for both candidates.
struct PairLossInputs {
  const PreferencePair* pair = nullptr;
  int t = 1;
  std::vector<double> eps_a;
  std::vector<double> eps_b;
};

// sigma(r_w - r_l): the Bradley-Terry win probability.
double bt_probability(double r_w, double r_l);
// Mean of -log sigma(r_w - r_l).
double bt_loss(std::span<const std::pair<double, double>> rewards);

// Numerically stable sigma and -log(sigma).
double sigmoid(double z);
double softplus_neg(double z);  // -log(sigma(z)) = log(1 + exp(-z))

// The per-timestep preference surrogate
//   l = -[ (||eps_a - e_theta(x_t^a)||^2 - ||eps_a - e_ref(x_t^a)||^2)
//        - (||eps_b - e_theta(x_t^b)||^2 - ||eps_b - e_ref(x_t^b)||^2) ]
// with x_t^* = forward_noise(x_*, t, eps_*). Positive l favors sample_a.
double l_theta(const ModelPair& models, const PairLossInputs& in, const NoiseSchedule& schedule);

// Batch mean of -log sigma(beta * s * l) with s the consensus label, and
// its exact gradient w.r.t. theta (accumulated into grad). Exactly one
// loss-gradient evaluation is counted per call regardless of K.
double balanced_loss_and_grad(std::span<const PairLossInputs> batch, const ModelPair& models,
                              const NoiseSchedule& schedule, const DpoConfig& cfg,
                              std::span<double> grad);

// Batch mean of sum_k w_k * -log sigma(beta * s_k * l) over the votes;
// abstained votes contribute w_k * ln 2 and no gradient.
double vanilla_loss_and_grad(std::span<const PairLossInputs> batch, const ModelPair& models,
                             const NoiseSchedule& schedule, const DpoConfig& cfg,
                             std::span<double> grad);

}  // namespace bdpo
