#include "bdpo/aggregate.hpp"

#include <cmath>

#include "bdpo/counters.hpp"
#include "bdpo/errors.hpp"

namespace bdpo {

AggregationMode aggregation_mode_from_string(std::string_view name) {
  if (name == "majority") return AggregationMode::majority;
  if (name == "vanilla_sum") return AggregationMode::vanilla_sum;
  if (name == "normalized_sum") return AggregationMode::normalized_sum;
  if (name == "random_metric") return AggregationMode::random_metric;
  if (name == "single_metric") return AggregationMode::single_metric;
  throw ValidationError("unknown aggregation mode '" + std::string(name) + "'");
}

std::string_view to_string(AggregationMode mode) {
  switch (mode) {
    case AggregationMode::majority: return "majority";
    case AggregationMode::vanilla_sum: return "vanilla_sum";
    case AggregationMode::normalized_sum: return "normalized_sum";
    case AggregationMode::random_metric: return "random_metric";
    case AggregationMode::single_metric: return "single_metric";
  }
  throw ValidationError("unknown aggregation mode value");
}

TiePolicy tie_policy_from_string(std::string_view name) {
  if (name == "first_metric") return TiePolicy::first_metric;
  if (name == "skip_pair") return TiePolicy::skip_pair;
  if (name == "fixed_plus") return TiePolicy::fixed_plus;
  throw ValidationError("unknown tie policy '" + std::string(name) + "'");
}

std::string_view to_string(TiePolicy policy) {
  switch (policy) {
    case TiePolicy::first_metric: return "first_metric";
    case TiePolicy::skip_pair: return "skip_pair";
    case TiePolicy::fixed_plus: return "fixed_plus";
  }
  throw ValidationError("unknown tie policy value");
}

int vote_metric(double r_a, double r_b, double margin, bool paper_faithful) {
  counters::vote_comparisons.fetch_add(1, std::memory_order_relaxed);
  if (!std::isfinite(r_a) || !std::isfinite(r_b))
    throw ValidationError("vote_metric needs finite rewards");
  if (margin < 0) throw ValidationError("vote margin must be >= 0");
  if (paper_faithful && margin == 0.0) return r_a >= r_b ? 1 : -1;
  if (r_a - r_b > margin) return 1;
  if (r_b - r_a > margin) return -1;
  return 0;
}

namespace {

// Tie resolution shared by every mode: used when the mode's decision
// statistic lands exactly on zero.
std::optional<ConsensusLabel> break_tie(const VoteVector& votes, TiePolicy policy) {
  switch (policy) {
    case TiePolicy::skip_pair:
      return std::nullopt;
    case TiePolicy::fixed_plus:
      return ConsensusLabel{1, true};
    case TiePolicy::first_metric:
      for (int v : votes.votes)
        if (v != 0) return ConsensusLabel{v, true};
      return std::nullopt;  // every metric abstained
  }
  throw ValidationError("unknown tie policy value");
}

std::vector<double> resolve_weights(const AggregationPolicy& policy, std::size_t k) {
  if (policy.weights.empty()) return std::vector<double>(k, 1.0 / static_cast<double>(k));
  if (policy.weights.size() != k)
    throw ValidationError("aggregation weights count " + std::to_string(policy.weights.size()) +
                          " does not match metric count " + std::to_string(k));
  bool any = false;
  for (double w : policy.weights) {
    if (!std::isfinite(w)) throw ValidationError("aggregation weights must be finite");
    if (w != 0.0) any = true;
  }
  if (!any) throw ValidationError("aggregation weights must not all be zero");
  return policy.weights;
}

double margin_for(const AggregationPolicy& policy, std::size_t k, std::size_t i) {
  if (policy.margins.empty()) return 0.0;
  if (policy.margins.size() != k)
    throw ValidationError("margin count " + std::to_string(policy.margins.size()) +
                          " does not match metric count " + std::to_string(k));
  return policy.margins[i];
}

std::optional<ConsensusLabel> from_sign(double statistic, const VoteVector& votes,
                                        TiePolicy policy) {
  if (statistic > 0) return ConsensusLabel{1, false};
  if (statistic < 0) return ConsensusLabel{-1, false};
  return break_tie(votes, policy);
}

}  // namespace

std::optional<ConsensusLabel> majority_consensus(const VoteVector& votes, TiePolicy policy) {
  if (votes.votes.empty()) throw ValidationError("majority_consensus needs at least one vote");
  int sum = 0;
  for (int v : votes.votes) {
    if (v < -1 || v > 1) throw ValidationError("vote outside {-1, 0, +1}");
    sum += v;
  }
  if (sum > 0) return ConsensusLabel{1, false};
  if (sum < 0) return ConsensusLabel{-1, false};
  return break_tie(votes, policy);
}

std::optional<PreferencePair> label_pair(const PreferencePair& pair,
                                         const AggregationPolicy& policy,
                                         const NormalizationStats* stats,
                                         RngStream& rng) {
  const std::size_t k = pair.scores_a.values.size();
  if (k == 0 || pair.scores_b.values.size() != k)
    throw ValidationError("pair " + std::to_string(pair.pair_id) + " lacks usable scores");

  PreferencePair out = pair;
  VoteVector votes;
  votes.votes.reserve(k);
  for (std::size_t i = 0; i < k; ++i)
    votes.votes.push_back(vote_metric(pair.scores_a.values[i], pair.scores_b.values[i],
                                      margin_for(policy, k, i), policy.paper_faithful_votes));

  std::optional<ConsensusLabel> label;
  switch (policy.mode) {
    case AggregationMode::majority:
      label = majority_consensus(votes, policy.tie_policy);
      break;
    case AggregationMode::vanilla_sum: {
      auto w = resolve_weights(policy, k);
      double sum = 0.0;
      for (std::size_t i = 0; i < k; ++i)
        sum += w[i] * (pair.scores_a.values[i] - pair.scores_b.values[i]);
      label = from_sign(sum, votes, policy.tie_policy);
      break;
    }
    case AggregationMode::normalized_sum: {
      if (!stats)
        throw ValidationError("normalized_sum needs normalization stats");
      if (stats->metric_ids != pair.scores_a.metric_ids)
        throw ValidationError("normalization stats metric ids do not match pair " +
                              std::to_string(pair.pair_id));
      auto w = resolve_weights(policy, k);
      double sum = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        double za = (pair.scores_a.values[i] - stats->mean[i]) / stats->stddev[i];
        double zb = (pair.scores_b.values[i] - stats->mean[i]) / stats->stddev[i];
        sum += w[i] * (za - zb);
      }
      label = from_sign(sum, votes, policy.tie_policy);
      break;
    }
    case AggregationMode::random_metric: {
      std::uint64_t j = rng.uniform_int(static_cast<std::uint64_t>(k));
      int v = votes.votes[static_cast<std::size_t>(j)];
      label = v != 0 ? std::optional<ConsensusLabel>(ConsensusLabel{v, false})
                     : break_tie(votes, policy.tie_policy);
      break;
    }
    case AggregationMode::single_metric: {
      if (policy.chosen_metric.empty())
        throw ValidationError("single_metric needs a chosen metric");
      int idx = -1;
      for (std::size_t i = 0; i < k; ++i)
        if (pair.scores_a.metric_ids[i] == policy.chosen_metric) {
          idx = static_cast<int>(i);
          break;
        }
      if (idx < 0)
        throw ValidationError("metric '" + policy.chosen_metric + "' is not in pair " +
                              std::to_string(pair.pair_id));
      int v = votes.votes[static_cast<std::size_t>(idx)];
      label = v != 0 ? std::optional<ConsensusLabel>(ConsensusLabel{v, false})
                     : break_tie(votes, policy.tie_policy);
      break;
    }
  }

  if (!label) return std::nullopt;
  out.votes = std::move(votes);
  out.consensus = *label;
  return out;
}

std::vector<PreferencePair> label_dataset(std::span<const PreferencePair> pairs,
                                          const AggregationPolicy& policy,
                                          const NormalizationStats* stats,
                                          std::uint64_t seed) {
  RngStream root = RngStream(seed).split("label");
  std::vector<PreferencePair> labeled;
  labeled.reserve(pairs.size());
  for (const PreferencePair& p : pairs) {
    RngStream sub = root.split(static_cast<std::uint64_t>(p.pair_id));
    if (auto out = label_pair(p, policy, stats, sub)) labeled.push_back(std::move(*out));
  }
  return labeled;
}

NormalizationStats compute_normalization(std::span<const PreferencePair> pairs) {
  if (pairs.size() < 2) throw ValidationError("normalization needs at least 2 pairs");
  const std::vector<std::string>& ids = pairs.front().scores_a.metric_ids;
  const std::size_t k = ids.size();
  if (k == 0) throw ValidationError("normalization needs scored pairs");

  NormalizationStats stats;
  stats.metric_ids = ids;
  stats.mean.assign(k, 0.0);
  stats.stddev.assign(k, 0.0);

  const double n = 2.0 * static_cast<double>(pairs.size());
  for (const PreferencePair& p : pairs) {
    if (p.scores_a.metric_ids != ids || p.scores_b.metric_ids != ids ||
        p.scores_a.values.size() != k || p.scores_b.values.size() != k)
      throw ValidationError("pair " + std::to_string(p.pair_id) +
                            " metric ids differ from the first pair");
    for (std::size_t i = 0; i < k; ++i)
      stats.mean[i] += p.scores_a.values[i] + p.scores_b.values[i];
  }
  for (std::size_t i = 0; i < k; ++i) stats.mean[i] /= n;
  for (const PreferencePair& p : pairs)
    for (std::size_t i = 0; i < k; ++i) {
      double da = p.scores_a.values[i] - stats.mean[i];
      double db = p.scores_b.values[i] - stats.mean[i];
      stats.stddev[i] += da * da + db * db;
    }
  for (std::size_t i = 0; i < k; ++i) {
    stats.stddev[i] = std::sqrt(stats.stddev[i] / n);
    if (!(stats.stddev[i] > 0))
      throw ValidationError("metric '" + ids[i] + "' has zero variance; cannot normalize");
  }
  return stats;
}

}  // namespace bdpo
