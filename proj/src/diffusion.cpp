#include "bdpo/diffusion.hpp"

#include <cmath>
#include <string>

#include "bdpo/counters.hpp"
#include "bdpo/errors.hpp"
#include "bdpo/rewards.hpp"

namespace bdpo {

OmegaMode omega_mode_from_string(std::string_view name) {
  if (name == "constant_one") return OmegaMode::constant_one;
  if (name == "snr") return OmegaMode::snr;
  throw ValidationError("unknown omega mode '" + std::string(name) + "'");
}

std::string_view to_string(OmegaMode mode) {
  switch (mode) {
    case OmegaMode::constant_one: return "constant_one";
    case OmegaMode::snr: return "snr";
  }
  throw ValidationError("unknown omega mode value");
}

double dm_loss_and_grad(const DenoiserParams& params,
                        std::span<const std::pair<Sample, Condition>> batch,
                        const NoiseSchedule& schedule, OmegaMode omega, RngStream& rng,
                        std::span<double> grad) {
  if (batch.empty()) throw ValidationError("dm_loss_and_grad needs a non-empty batch");
  const std::size_t d = static_cast<std::size_t>(params.cfg.d);
  if (grad.size() != params.cfg.param_count())
    throw ValidationError("dm_loss_and_grad: grad buffer size mismatch");

  DenoiserWorkspace ws;
  std::vector<double> eps(d), out(d), d_out(d);
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  for (const auto& [x0, c] : batch) {
    int t = 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(schedule.t_steps)));
    for (double& e : eps) e = rng.normal();
    std::vector<double> x_t = forward_noise(schedule, x0.x, t, eps);
    denoise_into(params, x_t, t, c, ws, out);
    double w = omega == OmegaMode::snr ? schedule.snr(t) : 1.0;
    double sq = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      double r = out[i] - eps[i];
      sq += r * r;
      d_out[i] = 2.0 * w * inv_b * r;
    }
    loss += w * sq;
    denoise_backward(params, ws, d_out, grad);
  }
  return loss * inv_b;
}

std::vector<std::vector<double>> MixtureConfig::means() const {
  return circle_means(num_conditions, d, radius);
}

Sample mixture_draw(const MixtureConfig& mix, const Condition& c, RngStream& rng) {
  if (c.id < 0 || c.id >= mix.num_conditions)
    throw ValidationError("mixture condition " + std::to_string(c.id) + " outside 0.." +
                          std::to_string(mix.num_conditions - 1));
  if (!(mix.stddev > 0)) throw ValidationError("mixture stddev must be positive");
  auto mu = mix.means();
  Sample s;
  s.x.resize(static_cast<std::size_t>(mix.d));
  for (int i = 0; i < mix.d; ++i) s.x[i] = mu[c.id][i] + mix.stddev * rng.normal();
  return s;
}

PretrainResult pretrain(const PretrainConfig& cfg) {
  if (cfg.steps < 0 || cfg.batch_size < 1)
    throw ValidationError("pretrain needs steps >= 0 and batch_size >= 1");
  if (cfg.model.d != cfg.mixture.d)
    throw ValidationError("pretrain: model d and mixture d disagree");
  if (cfg.model.c != cfg.mixture.num_conditions)
    throw ValidationError("pretrain: model condition count and mixture disagree");

  NoiseSchedule schedule = cfg.schedule.build();
  RngStream root(cfg.seed);
  RngStream init_stream = root.split("init");
  RngStream data_root = root.split("pretrain");

  PretrainResult res;
  res.params = DenoiserParams::random_init(cfg.model, init_stream);
  res.loss_per_step.reserve(static_cast<std::size_t>(cfg.steps));

  OptimizerState opt_state;
  std::vector<double> grad(cfg.model.param_count());
  std::vector<std::pair<Sample, Condition>> batch(static_cast<std::size_t>(cfg.batch_size));

  for (int step = 1; step <= cfg.steps; ++step) {
    RngStream rng = data_root.split(static_cast<std::uint64_t>(step));
    for (auto& [x0, c] : batch) {
      c.id = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(cfg.mixture.num_conditions)));
      x0 = mixture_draw(cfg.mixture, c, rng);
    }
    std::fill(grad.begin(), grad.end(), 0.0);
    double loss = dm_loss_and_grad(res.params, batch, schedule, cfg.omega, rng, grad);
    if (!std::isfinite(loss))
      throw NumericalError("pretraining loss became non-finite at step " + std::to_string(step));
    optimizer_step(res.params.w, grad, opt_state, cfg.optim, cfg.learning_rate);
    res.loss_per_step.push_back(loss);
  }
  return res;
}

Sample sample(const DenoiserParams& params, const NoiseSchedule& schedule, const Condition& c,
              RngStream& rng) {
  counters::sampler_calls.fetch_add(1, std::memory_order_relaxed);
  const std::size_t d = static_cast<std::size_t>(params.cfg.d);
  std::vector<double> x(d);
  for (double& v : x) v = rng.normal();

  DenoiserWorkspace ws;
  std::vector<double> eps_hat(d);
  for (int t = schedule.t_steps; t >= 1; --t) {
    denoise_into(params, x, t, c, ws, eps_hat);
    double step_a = schedule.step_alpha(t);
    double beta = 1.0 - step_a;
    double sigma_t = schedule.sigma(t);
    double inv_sqrt = 1.0 / std::sqrt(step_a);
    for (std::size_t i = 0; i < d; ++i)
      x[i] = inv_sqrt * (x[i] - beta / sigma_t * eps_hat[i]);
    if (t > 1) {
      double beta_tilde =
          (1.0 - schedule.alpha_bar[t - 1]) / (1.0 - schedule.alpha_bar[t]) * beta;
      double noise_scale = std::sqrt(beta_tilde);
      for (std::size_t i = 0; i < d; ++i) x[i] += noise_scale * rng.normal();
    }
  }
  Sample s;
  s.x = std::move(x);
  return s;
}

}  // namespace bdpo
