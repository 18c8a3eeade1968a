#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bdpo/rng.hpp"
#include "bdpo/types.hpp"

namespace bdpo {

enum class AggregationMode { majority, vanilla_sum, normalized_sum, random_metric, single_metric };
enum class TiePolicy { first_metric, skip_pair, fixed_plus };

AggregationMode aggregation_mode_from_string(std::string_view name);
std::string_view to_string(AggregationMode mode);
TiePolicy tie_policy_from_string(std::string_view name);
std::string_view to_string(TiePolicy policy);

struct AggregationPolicy {
  AggregationMode mode = AggregationMode::majority;
  // Empty weights mean equal 1/K (vanilla_sum / normalized_sum only).
  std::vector<double> weights;
  // Metric followed in single_metric mode.
  std::string chosen_metric;
  TiePolicy tie_policy = TiePolicy::first_metric;
  // Per-metric abstention margins tau_k >= 0; empty means all zero.
  std::vector<double> margins;
  // Restores the tie-goes-to-A (>=) vote rule instead of abstention.
  bool paper_faithful_votes = false;
  friend bool operator==(const AggregationPolicy&, const AggregationPolicy&) = default;
};

// Pooled per-metric moments over scores_a and scores_b of a dataset,
// population convention (divide by the pooled count).
struct NormalizationStats {
  std::vector<std::string> metric_ids;
  std::vector<double> mean;
  std::vector<double> stddev;
  friend bool operator==(const NormalizationStats&, const NormalizationStats&) = default;
};

// +1 if r_a - r_b > margin, -1 if r_b - r_a > margin, else 0.
// paper_faithful with margin 0: r_a >= r_b decides +1, never abstains.
int vote_metric(double r_a, double r_b, double margin = 0.0, bool paper_faithful = false);

// Sign of the vote sum; ties resolved by policy. nullopt = skip the pair
// (skip_pair on a tie, or first_metric when every vote abstained).
std::optional<ConsensusLabel> majority_consensus(const VoteVector& votes, TiePolicy policy);

// Fills votes (always, for audit) and consensus according to the policy.
// stats is required for normalized_sum. rng is consumed only by
// random_metric (one uniform_int draw). nullopt = pair skipped.
std::optional<PreferencePair> label_pair(const PreferencePair& pair,
                                         const AggregationPolicy& policy,
                                         const NormalizationStats* stats,
                                         RngStream& rng);

// Labels every pair with a substream keyed by pair_id so results do not
// depend on iteration order; skipped pairs are dropped.
std::vector<PreferencePair> label_dataset(std::span<const PreferencePair> pairs,
                                          const AggregationPolicy& policy,
                                          const NormalizationStats* stats,
                                          std::uint64_t seed);

NormalizationStats compute_normalization(std::span<const PreferencePair> pairs);

}  // namespace bdpo
