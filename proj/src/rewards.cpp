#include "bdpo/rewards.hpp"

#include <cmath>
#include <numbers>
#include <unordered_set>

#include "bdpo/counters.hpp"
#include "bdpo/errors.hpp"

namespace bdpo {

RewardKind reward_kind_from_string(std::string_view name) {
  if (name == "target_proximity") return RewardKind::target_proximity;
  if (name == "compactness") return RewardKind::compactness;
  if (name == "axis_preference") return RewardKind::axis_preference;
  if (name == "ring_fit") return RewardKind::ring_fit;
  throw ValidationError("unknown reward kind '" + std::string(name) + "'");
}

std::string_view to_string(RewardKind kind) {
  switch (kind) {
    case RewardKind::target_proximity: return "target_proximity";
    case RewardKind::compactness: return "compactness";
    case RewardKind::axis_preference: return "axis_preference";
    case RewardKind::ring_fit: return "ring_fit";
  }
  throw ValidationError("unknown reward kind value");
}

std::vector<std::string> RewardRegistry::metric_ids() const {
  std::vector<std::string> ids;
  ids.reserve(specs.size());
  for (const RewardSpec& s : specs) ids.push_back(s.metric_id);
  return ids;
}

int RewardRegistry::index_of(std::string_view metric_id) const {
  for (int k = 0; k < size(); ++k)
    if (specs[k].metric_id == metric_id) return k;
  throw ValidationError("metric '" + std::string(metric_id) + "' is not registered");
}

void validate_registry(const RewardRegistry& reg, int num_conditions, int d) {
  if (reg.specs.empty()) throw ValidationError("reward registry is empty");
  std::unordered_set<std::string> seen;
  for (const RewardSpec& s : reg.specs) {
    const std::string where = "rewards.metric " + s.metric_id + ": ";
    if (s.metric_id.empty()) throw ValidationError("rewards.metric: empty metric_id");
    if (!seen.insert(s.metric_id).second)
      throw ValidationError(where + "duplicate metric_id");
    if (!(s.scale > 0)) throw ValidationError(where + "scale must be positive");
    if (s.kind == RewardKind::target_proximity) {
      if (s.targets.size() != static_cast<std::size_t>(num_conditions))
        throw ValidationError(where + "needs one target point per condition (" +
                              std::to_string(num_conditions) + "), got " +
                              std::to_string(s.targets.size()));
      for (const auto& t : s.targets)
        if (t.size() != static_cast<std::size_t>(d))
          throw ValidationError(where + "target point dimension != " + std::to_string(d));
    }
    if (s.kind == RewardKind::ring_fit && !(s.rho >= 0))
      throw ValidationError(where + "rho must be non-negative");
  }
}

double evaluate(const RewardSpec& spec, const Condition& c, const Sample& x) {
  counters::reward_evaluations.fetch_add(1, std::memory_order_relaxed);
  double sq = 0.0;
  for (double v : x.x) sq += v * v;
  switch (spec.kind) {
    case RewardKind::target_proximity: {
      if (c.id < 0 || static_cast<std::size_t>(c.id) >= spec.targets.size())
        throw ValidationError("metric '" + spec.metric_id + "' has no target for condition " +
                              std::to_string(c.id));
      const auto& mu = spec.targets[c.id];
      if (mu.size() != x.x.size())
        throw ValidationError("metric '" + spec.metric_id + "' target dimension mismatch");
      double dist2 = 0.0;
      for (std::size_t i = 0; i < mu.size(); ++i) {
        double dv = x.x[i] - mu[i];
        dist2 += dv * dv;
      }
      return spec.scale * std::exp(-dist2);
    }
    case RewardKind::compactness:
      return spec.scale * (-sq);
    case RewardKind::axis_preference:
      if (x.x.empty()) throw ValidationError("axis_preference needs a non-empty sample");
      return spec.scale * x.x[0];
    case RewardKind::ring_fit: {
      double dev = std::sqrt(sq) - spec.rho;
      return spec.scale * (-(dev * dev));
    }
  }
  throw ValidationError("unknown reward kind value");
}

ScoreVector score_all(const RewardRegistry& reg, const Condition& c, const Sample& x) {
  if (reg.specs.empty()) throw ValidationError("reward registry is empty");
  ScoreVector out;
  out.values.reserve(reg.specs.size());
  out.metric_ids.reserve(reg.specs.size());
  for (const RewardSpec& s : reg.specs) {
    out.values.push_back(evaluate(s, c, x));
    out.metric_ids.push_back(s.metric_id);
  }
  return out;
}

std::vector<std::vector<double>> circle_means(int num_conditions, int d, double radius) {
  if (num_conditions < 1) throw ValidationError("num_conditions must be >= 1");
  if (d < 1) throw ValidationError("d must be >= 1");
  std::vector<std::vector<double>> means(num_conditions, std::vector<double>(d, 0.0));
  for (int c = 0; c < num_conditions; ++c) {
    double angle = 2.0 * std::numbers::pi * c / num_conditions;
    means[c][0] = radius * std::cos(angle);
    if (d > 1) means[c][1] = radius * std::sin(angle);
  }
  return means;
}

RewardRegistry default_registry(int num_conditions, int d) {
  RewardRegistry reg;
  reg.specs.push_back({"m_target", RewardKind::target_proximity, 1.0,
                       circle_means(num_conditions, d), 0.0});
  reg.specs.push_back({"m_compact", RewardKind::compactness, 100.0, {}, 0.0});
  reg.specs.push_back({"m_axis", RewardKind::axis_preference, 0.01, {}, 0.0});
  reg.specs.push_back({"m_ring", RewardKind::ring_fit, 1000.0, {}, 1.0});
  validate_registry(reg, num_conditions, d);
  return reg;
}

}  // namespace bdpo
