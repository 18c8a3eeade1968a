#include "bdpo/rng.hpp"

#include <cmath>
#include <numbers>

namespace bdpo {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// splitmix64 finalizer (Stafford mix13).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ull;
  }
  return h;
}

constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t key) noexcept {
  return mix64(mix64(seed + kGolden) ^ mix64(key + kGolden));
}

}  // namespace

RngStream RngStream::split(std::string_view label) const noexcept {
  return RngStream(derive(seed_, fnv1a64(label)));
}

RngStream RngStream::split(std::uint64_t key) const noexcept {
  return RngStream(derive(seed_, key));
}

std::uint64_t RngStream::next_u64() noexcept {
  state_ += kGolden;
  return mix64(state_);
}

double RngStream::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::normal() noexcept {
  // 1 - uniform() lies in (0, 1], keeping the log argument positive.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  return r * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t RngStream::uniform_int(std::uint64_t bound) noexcept {
  // Rejection below the largest multiple of bound keeps the draw unbiased.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t u = next_u64();
    if (u >= threshold) return (u - threshold) % bound;
  }
}

}  // namespace bdpo
