#include "bdpo/counters.hpp"

namespace bdpo::counters {

std::atomic<std::uint64_t> reward_evaluations{0};
std::atomic<std::uint64_t> vote_comparisons{0};
std::atomic<std::uint64_t> loss_grad_evaluations{0};
std::atomic<std::uint64_t> sampler_calls{0};

void reset() {
  reward_evaluations.store(0, std::memory_order_relaxed);
  vote_comparisons.store(0, std::memory_order_relaxed);
  loss_grad_evaluations.store(0, std::memory_order_relaxed);
  sampler_calls.store(0, std::memory_order_relaxed);
}

}  // namespace bdpo::counters
