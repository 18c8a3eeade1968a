#include "bdpo/trainer.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "bdpo/errors.hpp"
#include "bdpo/rng.hpp"
#include "bdpo/text.hpp"

namespace bdpo {
namespace {

void check_labels(std::span<const PreferencePair> labeled, LossMode mode) {
  for (const PreferencePair& p : labeled) {
    if (mode == LossMode::vanilla) {
      if (!p.votes)
        throw ValidationError("pair " + std::to_string(p.pair_id) +
                              " has no votes; vanilla mode trains on votes");
    } else if (!p.consensus) {
      throw ValidationError("pair " + std::to_string(p.pair_id) +
                            " has no consensus label; run the labeling stage first");
    }
  }
}

}  // namespace

std::pair<DenoiserParams, RunRecord> train(std::span<const PreferencePair> labeled,
                                           const DenoiserParams& init,
                                           const NoiseSchedule& schedule,
                                           const TrainConfig& cfg) {
  if (labeled.empty()) throw ValidationError("training needs a non-empty labeled dataset");
  if (cfg.steps < 0 || cfg.batch_size < 1)
    throw ValidationError("training needs steps >= 0 and batch_size >= 1");
  if (cfg.ref_update_interval && *cfg.ref_update_interval < 1)
    throw ValidationError("ref_update_interval must be >= 1 when enabled");
  if (cfg.warmup_steps < 0) throw ValidationError("warmup_steps must be >= 0");
  check_labels(labeled, cfg.mode);

  const std::size_t d = static_cast<std::size_t>(init.cfg.d);
  for (const PreferencePair& p : labeled)
    if (p.sample_a.x.size() != d || p.sample_b.x.size() != d)
      throw ValidationError("pair " + std::to_string(p.pair_id) +
                            " sample dimension does not match the model");

  ModelPair models{init, init};
  DpoConfig dpo_cfg;
  dpo_cfg.beta = cfg.beta;
  dpo_cfg.loss_mode = cfg.mode;
  dpo_cfg.weights = cfg.weights;

  RngStream step_root = RngStream(cfg.seed).split("train");
  OptimizerState opt_state;
  std::vector<double> grad(init.cfg.param_count());
  std::vector<PairLossInputs> batch(static_cast<std::size_t>(cfg.batch_size));
  for (PairLossInputs& in : batch) {
    in.eps_a.resize(d);
    in.eps_b.resize(d);
  }

  RunRecord record;
  record.steps.reserve(static_cast<std::size_t>(cfg.steps));

  for (int step = 1; step <= cfg.steps; ++step) {
    RngStream rng = step_root.split(static_cast<std::uint64_t>(step));
    for (PairLossInputs& in : batch) {
      std::uint64_t idx = rng.uniform_int(labeled.size());
      in.pair = &labeled[static_cast<std::size_t>(idx)];
      in.t = 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(schedule.t_steps)));
      for (double& e : in.eps_a) e = rng.normal();
      for (double& e : in.eps_b) e = rng.normal();
    }

    std::fill(grad.begin(), grad.end(), 0.0);
    double loss = cfg.mode == LossMode::vanilla
                      ? vanilla_loss_and_grad(batch, models, schedule, dpo_cfg, grad)
                      : balanced_loss_and_grad(batch, models, schedule, dpo_cfg, grad);

    double grad_norm_sq = 0.0;
    for (double g : grad) grad_norm_sq += g * g;
    if (!std::isfinite(loss) || !std::isfinite(grad_norm_sq))
      throw NumericalError("training loss became non-finite at step " + std::to_string(step));

    double lr = cfg.learning_rate;
    if (cfg.warmup_steps > 0 && step <= cfg.warmup_steps)
      lr = cfg.learning_rate * static_cast<double>(step) / cfg.warmup_steps;
    optimizer_step(models.theta.w, grad, opt_state, cfg.optim, lr);

    bool refreshed = false;
    if (cfg.ref_update_interval && step % *cfg.ref_update_interval == 0) {
      models.ref = models.theta;
      refreshed = true;
      ++record.ref_refresh_count;
    }
    record.steps.push_back({step, loss, std::sqrt(grad_norm_sq), refreshed, lr});
  }

  return {std::move(models.theta), std::move(record)};
}

void write_metrics_csv(const RunRecord& record, const std::filesystem::path& path,
                       std::span<const std::string> comment_lines) {
  std::ostringstream out;
  for (const std::string& line : comment_lines) out << "# " << line << '\n';
  out << "step,loss,grad_norm,ref_refreshed,lr_effective\n";
  for (const StepRecord& s : record.steps)
    out << s.step << ',' << format_double(s.loss) << ',' << format_double(s.grad_norm) << ','
        << (s.ref_refreshed ? 1 : 0) << ',' << format_double(s.lr_effective) << '\n';

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open " + path.string() + " for writing");
  file << out.str();
  file.flush();
  if (!file) throw IoError("write to " + path.string() + " failed");
}

}  // namespace bdpo
