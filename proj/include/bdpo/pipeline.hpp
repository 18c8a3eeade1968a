#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bdpo/config.hpp"

namespace bdpo {

// One training variant: "<mode>[@noref]" where mode is balanced, vanilla,
// normalized, random, or single:<metric_id>. "@noref" disables reference
// refresh for that run (the ablation axis).
struct ModeSpec {
  LossMode mode = LossMode::balanced;
  std::string metric;
  bool ref_refresh = true;

  // Artifact-friendly identifier, e.g. "single_m_target_noref".
  std::string name() const;
  // Identifier of the labeled dataset this variant trains on; the noref
  // twin shares its labels.
  std::string label_name() const;
  AggregationMode aggregation_mode() const;
  friend bool operator==(const ModeSpec&, const ModeSpec&) = default;
};

ModeSpec parse_mode_spec(std::string_view spec);
std::vector<ModeSpec> parse_mode_list(std::string_view csv);

inline constexpr const char* kStageOrder[] = {"pretrain", "gen-pairs", "label",
                                              "train",    "evaluate",  "report"};

struct PipelineOptions {
  std::filesystem::path config_path;  // empty = built-in defaults
  std::filesystem::path out_dir = "run";
  std::vector<std::string> stages;    // empty = all, always executed in order
  std::vector<ModeSpec> modes;        // empty = {balanced}
  std::optional<std::uint64_t> seed;  // overrides [run] seed
  bool force = false;
  bool quiet = false;
};

// Executes the requested stages against a run directory; reads prior
// artifacts from it and skips stages whose outputs already exist unless
// force. Throws ValidationError/IoError/NumericalError on failure.
void run_pipeline(const PipelineOptions& opts);

// Deterministic per-stage seed derived from the experiment seed.
std::uint64_t stage_seed(std::uint64_t seed, std::string_view stage);

// Building blocks shared with the single-shot CLI commands. Each writes
// its artifact with a "config=<hash> seed=<n>" comment line.
void run_pretrain(const ExperimentConfig& cfg, std::uint64_t seed,
                  const std::filesystem::path& out_ckpt, bool quiet);
void run_gen_pairs(const ExperimentConfig& cfg, const std::filesystem::path& base_ckpt,
                   std::uint64_t seed, const std::filesystem::path& out_dataset, bool quiet);
void run_label(const ExperimentConfig& cfg, const ModeSpec& spec,
               const std::filesystem::path& in_dataset,
               const std::filesystem::path& out_dataset, std::uint64_t seed, bool quiet);
void run_train(const ExperimentConfig& cfg, const ModeSpec& spec,
               const std::filesystem::path& data_path, const std::filesystem::path& init_ckpt,
               const std::filesystem::path& out_ckpt, const std::filesystem::path& metrics_csv,
               std::uint64_t seed, bool quiet);
// Renders the win-rate CSV as aligned text tables.
void run_report(const std::filesystem::path& winrates_csv, const std::filesystem::path& out_txt,
                bool quiet);

}  // namespace bdpo
