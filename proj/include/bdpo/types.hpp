#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bdpo {

// Class label standing in for a conditioning prompt.
struct Condition {
  int id = 0;
  friend bool operator==(const Condition&, const Condition&) = default;
};

// A clean data point in R^d. All components must be finite.
struct Sample {
  std::vector<double> x;
  friend bool operator==(const Sample&, const Sample&) = default;
};

// The K reward values for one (condition, sample). metric_ids carries the
// stable metric ordering; it must be identical across a dataset.
struct ScoreVector {
  std::vector<double> values;
  std::vector<std::string> metric_ids;
  friend bool operator==(const ScoreVector&, const ScoreVector&) = default;
};

// Per-metric pairwise votes in {-1, 0, +1}. 0 records abstention on an
// exact tie (or a difference within the configured margin).
struct VoteVector {
  std::vector<int> votes;
  friend bool operator==(const VoteVector&, const VoteVector&) = default;
};

// Aggregated outcome: +1 prefers sample_a, -1 prefers sample_b.
struct ConsensusLabel {
  int s = 0;
  bool tie_broken = false;
  friend bool operator==(const ConsensusLabel&, const ConsensusLabel&) = default;
};

struct PreferencePair {
  std::int64_t pair_id = 0;
  Condition condition;
  Sample sample_a;
  Sample sample_b;
  ScoreVector scores_a;
  ScoreVector scores_b;
  std::optional<VoteVector> votes;
  std::optional<ConsensusLabel> consensus;
  friend bool operator==(const PreferencePair&, const PreferencePair&) = default;
};

}  // namespace bdpo
