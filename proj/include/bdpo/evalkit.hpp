#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "bdpo/denoiser.hpp"
#include "bdpo/rewards.hpp"
#include "bdpo/schedule.hpp"
#include "bdpo/types.hpp"

namespace bdpo {

struct EvalConfig {
  int n_seeds = 5;
  // Evaluation units; conditions may repeat to enlarge the comparison set.
  std::vector<Condition> units;
  RewardRegistry registry;
  // Contribution of an exact score tie to the win count; 0.5 keeps
  // win_rate(a,b) + win_rate(b,a) = 1, 0 counts ties as losses for a.
  double tie_value = 0.5;
};

// best[u][k] = max over n_seeds samples of metric k's score for unit u.
// Maxima are taken per metric, so they may come from different samples.
struct BestScores {
  std::vector<Condition> units;
  std::vector<std::string> metric_ids;
  std::vector<std::vector<double>> best;
};

// Draws n_seeds samples per unit with substreams keyed by (unit index,
// seed index); two models evaluated with the same seed see the same
// noise draws (paired design).
BestScores best_scores(const DenoiserParams& params, const NoiseSchedule& schedule,
                       const EvalConfig& cfg, std::uint64_t seed);

struct WinRateReport {
  std::string model_a;
  std::string model_b;
  std::vector<std::string> metric_ids;
  std::vector<double> win_rate;  // in [0, 1]
  std::vector<int> ties;
  int n_units = 0;
};

// Per metric: (count[a > b] + tie_value * count[a == b]) / n_units.
WinRateReport win_rate(const BestScores& a, const BestScores& b, double tie_value,
                       std::string model_a, std::string model_b);

// CSV columns: comparison, metric, win_rate_percent (2 decimals), ties, n.
// Also writes one gnuplot data file per comparison next to the CSV:
// <stem>_<model_a>_vs_<model_b>.dat with "metric percent" rows.
void write_report(std::span<const WinRateReport> reports, const std::filesystem::path& csv_path,
                  std::span<const std::string> comment_lines = {});

// Aligned text tables, one block per comparison.
std::string render_report(std::span<const WinRateReport> reports);

// One ablation row per (trained model, metric): win rate against the base
// model tagged with the run's refresh and multi-metric switches.
struct AblationRow {
  std::string model;
  bool ref_refresh = false;
  bool multi_metric = false;
  std::string metric;
  double win_rate = 0.0;
};

// CSV columns: model, ref_refresh, multi_metric, metric, win_rate_percent.
void write_ablation_table(std::span<const AblationRow> rows, const std::filesystem::path& path,
                          std::span<const std::string> comment_lines = {});

}  // namespace bdpo
