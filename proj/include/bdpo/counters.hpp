#pragma once

#include <atomic>
#include <cstdint>

namespace bdpo::counters {

// Relaxed tallies of hot-path call counts. Tests pin the complexity
// contracts against these: K reward evaluations per scored sample,
// K vote comparisons per labeled pair, one loss-gradient evaluation per
// training step, one sampler call per (condition, seed) during evaluation.

extern std::atomic<std::uint64_t> reward_evaluations;
extern std::atomic<std::uint64_t> vote_comparisons;
extern std::atomic<std::uint64_t> loss_grad_evaluations;
extern std::atomic<std::uint64_t> sampler_calls;

void reset();

}  // namespace bdpo::counters
