#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bdpo/aggregate.hpp"
#include "bdpo/diffusion.hpp"
#include "bdpo/evalkit.hpp"
#include "bdpo/rewards.hpp"
#include "bdpo/trainer.hpp"

namespace bdpo {

// One experiment, flat INI sections. Parsing applies defaults and
// normalizes (e.g. fills in the default metric list), so the rendered
// snapshot reloads to an identical config.
struct ExperimentConfig {
  // [data]
  int d = 2;
  int num_conditions = 4;
  double mixture_radius = 2.0;
  double mixture_stddev = 0.35;
  int pairs_per_condition = 250;

  // [rewards]; empty list = the default registry, filled by normalize().
  // target_proximity targets sit on a circle of `radius` (defaults to the
  // mixture radius); ring_fit uses `rho`.
  struct MetricDecl {
    std::string metric_id;
    RewardKind kind = RewardKind::target_proximity;
    double scale = 1.0;
    std::optional<double> rho;
    std::optional<double> radius;
    friend bool operator==(const MetricDecl&, const MetricDecl&) = default;
  };
  std::vector<MetricDecl> metrics;

  // [diffusion]
  int t_steps = 50;
  double beta_min = 0.005;
  double beta_max = 0.18;
  int hidden = 64;
  int time_features = 4;
  OmegaMode omega = OmegaMode::constant_one;

  // [pretrain]
  int pretrain_steps = 3000;
  int pretrain_batch_size = 64;
  double pretrain_learning_rate = 1e-3;
  OptimizerKind pretrain_optimizer = OptimizerKind::adaptive_moments;

  // [aggregation]
  TiePolicy tie_policy = TiePolicy::first_metric;
  double margin = 0.0;
  bool paper_faithful_votes = false;
  std::vector<double> weights;  // empty = equal

  // [dpo]
  double dpo_beta = 1.0;

  // [train]
  int train_steps = 1500;
  int train_batch_size = 64;
  double train_learning_rate = 1e-3;
  int warmup_steps = 0;
  int ref_update_interval = 100;  // 0 disables refresh
  OptimizerKind train_optimizer = OptimizerKind::adaptive_moments;
  double weight_decay = 0.0;

  // [eval]
  int eval_n_seeds = 5;
  int units_per_condition = 8;
  double tie_value = 0.5;

  // [run]
  std::uint64_t seed = 1;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;

  RewardRegistry build_registry() const;
  MixtureConfig mixture() const;
  DenoiserConfig model() const;
  ScheduleRecipe schedule() const;
  PretrainConfig pretrain_config(std::uint64_t stage_seed) const;
  AggregationPolicy aggregation(AggregationMode mode, std::string chosen_metric = {}) const;
  TrainConfig train_config(LossMode mode, bool ref_refresh, std::uint64_t stage_seed) const;
  EvalConfig eval_config() const;
};

// Fills defaulted lists and checks every field plus cross-section
// consistency; error messages carry section.key paths.
void normalize(ExperimentConfig& cfg);

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin = "config");
ExperimentConfig load_config(const std::filesystem::path& path);

// Canonical snapshot: every section and key, fixed order, normalized
// values. parse(render(cfg)) == cfg.
std::string render_config(const ExperimentConfig& cfg);

// 16-hex-digit digest of the canonical snapshot.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace bdpo
