#pragma once

#include <cstdint>
#include <string_view>

namespace bdpo {

// Deterministic splittable random stream built on the splitmix64 generator.
// Draws are bit-identical across runs and platforms for a given seed: no
// std::<distribution> types are used anywhere (their output is
// implementation-defined).
//
// Substreams are derived from the stream's *seed* and a label, never from
// its draw position, so split(label) is stable no matter how much the
// parent has been consumed.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) noexcept : seed_(seed), state_(seed) {}

  RngStream split(std::string_view label) const noexcept;
  RngStream split(std::uint64_t key) const noexcept;

  std::uint64_t next_u64() noexcept;

  // Uniform on [0, 1) with 53 random mantissa bits.
  double uniform() noexcept;

  // Standard normal via Box-Muller; consumes exactly two uniforms per draw.
  double normal() noexcept;

  // Unbiased uniform integer on [0, bound); bound must be >= 1.
  std::uint64_t uniform_int(std::uint64_t bound) noexcept;

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
};

}  // namespace bdpo
