#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bdpo/denoiser.hpp"
#include "bdpo/dpo.hpp"
#include "bdpo/optim.hpp"
#include "bdpo/schedule.hpp"
#include "bdpo/types.hpp"

namespace bdpo {

struct TrainConfig {
  int steps = 1500;
  int batch_size = 64;
  double learning_rate = 1e-3;
  int warmup_steps = 0;
  double beta = 1.0;
  // nullopt disables reference refresh entirely.
  std::optional<int> ref_update_interval = 100;
  LossMode mode = LossMode::balanced;
  std::vector<double> weights;  // vanilla loss weights; empty = equal
  OptimizerConfig optim;
  std::uint64_t seed = 0;
};

struct StepRecord {
  int step = 0;
  double loss = 0.0;
  double grad_norm = 0.0;
  bool ref_refreshed = false;
  double lr_effective = 0.0;
};

struct RunRecord {
  std::vector<StepRecord> steps;
  int ref_refresh_count = 0;
};

// The preference-optimization loop: ref starts at init; each step draws a
// batch with replacement plus fresh (t, eps_a, eps_b) per slot, takes one
// loss-gradient evaluation, applies the optimizer with linear warmup, and
// refreshes ref <- theta after the update whenever step % interval == 0.
//
// Randomness per step comes from seed-split("train")-split(step); inside a
// step each slot consumes, in order: pair index, timestep, d normals for
// eps_a, d normals for eps_b.
std::pair<DenoiserParams, RunRecord> train(std::span<const PreferencePair> labeled,
                                           const DenoiserParams& init,
                                           const NoiseSchedule& schedule,
                                           const TrainConfig& cfg);

// CSV columns: step, loss, grad_norm, ref_refreshed, lr_effective.
void write_metrics_csv(const RunRecord& record, const std::filesystem::path& path,
                       std::span<const std::string> comment_lines = {});

}  // namespace bdpo
