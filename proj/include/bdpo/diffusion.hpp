#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "bdpo/denoiser.hpp"
#include "bdpo/optim.hpp"
#include "bdpo/rng.hpp"
#include "bdpo/schedule.hpp"
#include "bdpo/types.hpp"

namespace bdpo {

enum class OmegaMode { constant_one, snr };

OmegaMode omega_mode_from_string(std::string_view name);
std::string_view to_string(OmegaMode mode);

// Mean of omega(snr_t) * ||eps - eps_hat(x_t, t, c)||^2 over the batch,
// with t ~ uniform{1..T} and eps ~ N(0, I) drawn per element. Consumes,
// per element in order: one uniform_int(T) for t, then d normals for eps.
// grad (param_count entries) receives the exact derivative; returns loss.
double dm_loss_and_grad(const DenoiserParams& params,
                        std::span<const std::pair<Sample, Condition>> batch,
                        const NoiseSchedule& schedule, OmegaMode omega, RngStream& rng,
                        std::span<double> grad);

// Per-condition isotropic Gaussians with means on a circle; the same
// geometry the default reward registry scores against.
struct MixtureConfig {
  int d = 2;
  int num_conditions = 4;
  double radius = 2.0;
  double stddev = 0.35;
  std::vector<std::vector<double>> means() const;
  friend bool operator==(const MixtureConfig&, const MixtureConfig&) = default;
};

// Consumes d normals.
Sample mixture_draw(const MixtureConfig& mix, const Condition& c, RngStream& rng);

struct PretrainConfig {
  DenoiserConfig model;
  ScheduleRecipe schedule;
  MixtureConfig mixture;
  int steps = 3000;
  int batch_size = 64;
  double learning_rate = 1e-3;
  OptimizerConfig optim;
  OmegaMode omega = OmegaMode::constant_one;
  std::uint64_t seed = 0;
};

struct PretrainResult {
  DenoiserParams params;
  std::vector<double> loss_per_step;
};

// Denoising-error pretraining on mixture draws. Deterministic in seed.
// Throws NumericalError naming the step if the loss turns non-finite.
PretrainResult pretrain(const PretrainConfig& cfg);

// Ancestral sampling x_T ~ N(0, I) down to x_0. Posterior variance is the
// lower-bound choice beta_tilde_t = (1 - abar_{t-1}) / (1 - abar_t) * beta_t;
// the final step adds no noise. Consumes d normals for x_T, then d normals
// per step for t = T..2.
Sample sample(const DenoiserParams& params, const NoiseSchedule& schedule, const Condition& c,
              RngStream& rng);

}  // namespace bdpo
