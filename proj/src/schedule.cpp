#include "bdpo/schedule.hpp"

#include <cmath>
#include <string>

#include "bdpo/errors.hpp"

namespace bdpo {
namespace {

void check_t(const NoiseSchedule& s, int t, int lowest) {
  if (t < lowest || t > s.t_steps)
    throw ValidationError("timestep " + std::to_string(t) + " outside " +
                          std::to_string(lowest) + ".." + std::to_string(s.t_steps));
}

}  // namespace

NoiseSchedule NoiseSchedule::linear_beta(int t_steps, double beta_min, double beta_max) {
  if (t_steps < 1) throw ValidationError("t_steps must be >= 1");
  if (!(beta_min > 0) || !(beta_max < 1) || beta_min > beta_max)
    throw ValidationError("need 0 < beta_min <= beta_max < 1");
  std::vector<double> bar(static_cast<std::size_t>(t_steps) + 1);
  bar[0] = 1.0;
  for (int t = 1; t <= t_steps; ++t) {
    double frac = t_steps == 1 ? 0.0 : static_cast<double>(t - 1) / (t_steps - 1);
    double beta = beta_min + (beta_max - beta_min) * frac;
    bar[t] = bar[t - 1] * (1.0 - beta);
  }
  return from_alpha_bar(std::move(bar));
}

NoiseSchedule NoiseSchedule::from_alpha_bar(std::vector<double> alpha_bar) {
  if (alpha_bar.size() < 2) throw ValidationError("schedule needs alpha_bar[0..T], T >= 1");
  if (alpha_bar[0] != 1.0) throw ValidationError("alpha_bar[0] must be exactly 1");
  for (std::size_t t = 1; t < alpha_bar.size(); ++t)
    if (!(alpha_bar[t] < alpha_bar[t - 1]))
      throw ValidationError("alpha_bar must be strictly decreasing at t=" + std::to_string(t));
  if (!(alpha_bar.back() > 0)) throw ValidationError("alpha_bar[T] must stay positive");
  NoiseSchedule s;
  s.t_steps = static_cast<int>(alpha_bar.size()) - 1;
  s.alpha_bar = std::move(alpha_bar);
  return s;
}

double NoiseSchedule::alpha(int t) const {
  check_t(*this, t, 0);
  return std::sqrt(alpha_bar[t]);
}

double NoiseSchedule::sigma(int t) const {
  check_t(*this, t, 0);
  return std::sqrt(1.0 - alpha_bar[t]);
}

double NoiseSchedule::snr(int t) const {
  check_t(*this, t, 1);
  return alpha_bar[t] / (1.0 - alpha_bar[t]);
}

double NoiseSchedule::step_alpha(int t) const {
  check_t(*this, t, 1);
  return alpha_bar[t] / alpha_bar[t - 1];
}

std::vector<double> forward_noise(const NoiseSchedule& schedule, std::span<const double> x0,
                                  int t, std::span<const double> eps) {
  check_t(schedule, t, 1);
  if (x0.size() != eps.size())
    throw ValidationError("forward_noise: x0 and eps sizes differ");
  double a = schedule.alpha(t);
  double s = schedule.sigma(t);
  std::vector<double> out(x0.size());
  for (std::size_t i = 0; i < x0.size(); ++i) out[i] = a * x0[i] + s * eps[i];
  return out;
}

}  // namespace bdpo
