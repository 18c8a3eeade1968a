#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "bdpo/types.hpp"

namespace bdpo {

enum class RewardKind { target_proximity, compactness, axis_preference, ring_fit };

RewardKind reward_kind_from_string(std::string_view name);
std::string_view to_string(RewardKind kind);

// One synthetic metric. `targets` is only read by target_proximity (one
// point per condition id); `rho` only by ring_fit.
struct RewardSpec {
  std::string metric_id;
  RewardKind kind = RewardKind::target_proximity;
  double scale = 1.0;
  std::vector<std::vector<double>> targets;
  double rho = 1.0;
  friend bool operator==(const RewardSpec&, const RewardSpec&) = default;
};

struct RewardRegistry {
  std::vector<RewardSpec> specs;

  int size() const { return static_cast<int>(specs.size()); }
  std::vector<std::string> metric_ids() const;
  // Throws ValidationError if the id is not registered.
  int index_of(std::string_view metric_id) const;
  friend bool operator==(const RewardRegistry&, const RewardRegistry&) = default;
};

// Checks scale positivity, unique ids, and kind-specific params; throws
// ValidationError naming the offending metric.
void validate_registry(const RewardRegistry& reg, int num_conditions, int d);

double evaluate(const RewardSpec& spec, const Condition& c, const Sample& x);

// values[k] = evaluate(specs[k], c, x); exactly K reward evaluations.
ScoreVector score_all(const RewardRegistry& reg, const Condition& c, const Sample& x);

// num_conditions points equally spaced on a circle of the given radius,
// embedded in the first two coordinates of R^d.
std::vector<std::vector<double>> circle_means(int num_conditions, int d, double radius = 2.0);

// The four built-in kinds with scales (1, 100, 0.01, 1000); the spread of
// scales makes dominance effects visible under sum aggregation.
RewardRegistry default_registry(int num_conditions, int d);

}  // namespace bdpo
