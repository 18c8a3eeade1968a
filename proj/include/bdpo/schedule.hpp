#pragma once

#include <span>
#include <vector>

namespace bdpo {

// Variance-preserving schedule stored as cumulative signal levels:
// alpha_bar[0] = 1, strictly decreasing, alpha_bar[T] > 0. Per-timestep
// coefficients follow as alpha(t) = sqrt(alpha_bar[t]) and
// sigma(t) = sqrt(1 - alpha_bar[t]), so alpha^2 + sigma^2 = 1 exactly.
struct NoiseSchedule {
  int t_steps = 0;
  std::vector<double> alpha_bar;

  // Per-step variances beta_t spaced linearly from beta_min to beta_max
  // over t = 1..T; alpha_bar is their running product of (1 - beta_t).
  static NoiseSchedule linear_beta(int t_steps, double beta_min, double beta_max);
  static NoiseSchedule from_alpha_bar(std::vector<double> alpha_bar);

  double alpha(int t) const;
  double sigma(int t) const;
  // Signal-to-noise ratio alpha^2/sigma^2.
  double snr(int t) const;
  // Single-step signal retention alpha_bar[t]/alpha_bar[t-1], i.e. 1 - beta_t.
  double step_alpha(int t) const;
};

// Parameters sufficient to rebuild a linear_beta schedule; carried by
// checkpoints so samplers reconstruct the exact training schedule.
struct ScheduleRecipe {
  int t_steps = 50;
  double beta_min = 0.005;
  double beta_max = 0.18;
  NoiseSchedule build() const { return NoiseSchedule::linear_beta(t_steps, beta_min, beta_max); }
  friend bool operator==(const ScheduleRecipe&, const ScheduleRecipe&) = default;
};

// x_t = alpha(t) * x0 + sigma(t) * eps, exactly. Throws on t outside 1..T.
std::vector<double> forward_noise(const NoiseSchedule& schedule, std::span<const double> x0,
                                  int t, std::span<const double> eps);

}  // namespace bdpo
