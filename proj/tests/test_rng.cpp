#include <cmath>
#include <cstdint>
#include <vector>

#include "bdpo/rng.hpp"
#include "doctest.h"

using bdpo::RngStream;

TEST_CASE("same seed and split key reproduce the stream") {
  RngStream a = RngStream(42).split("train").split(std::uint64_t{7});
  RngStream b = RngStream(42).split("train").split(std::uint64_t{7});
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different split keys diverge quickly") {
  RngStream a = RngStream(42).split(std::uint64_t{1});
  RngStream b = RngStream(42).split(std::uint64_t{2});
  bool differ = false;
  for (int i = 0; i < 10 && !differ; ++i) differ = a.next_u64() != b.next_u64();
  CHECK(differ);

  RngStream c = RngStream(42).split("label");
  RngStream d = RngStream(42).split("train");
  differ = false;
  for (int i = 0; i < 10 && !differ; ++i) differ = c.next_u64() != d.next_u64();
  CHECK(differ);
}

TEST_CASE("seed 0 and seed 1 give distinct streams") {
  RngStream a(0), b(1);
  bool differ = false;
  for (int i = 0; i < 10 && !differ; ++i) differ = a.next_u64() != b.next_u64();
  CHECK(differ);
}

TEST_CASE("split depends on identity, not on draw position") {
  RngStream a = RngStream(5).split("x");
  RngStream b = RngStream(5).split("x");
  for (int i = 0; i < 17; ++i) (void)b.next_u64();  // advance one copy only
  RngStream child_a = a.split(std::uint64_t{3});
  RngStream child_b = b.split(std::uint64_t{3});
  for (int i = 0; i < 20; ++i) CHECK(child_a.next_u64() == child_b.next_u64());
}

TEST_CASE("uniform stays in [0,1) and has the right mean") {
  RngStream r(123);
  const int n = 100000;
  double sum = 0;
  for (int i = 0; i < n; ++i) {
    double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  // SE of the mean is 1/sqrt(12 n) ~ 9.1e-4; allow 4 SE.
  CHECK(std::abs(sum / n - 0.5) < 4.0 / std::sqrt(12.0 * n));
}

TEST_CASE("normal matches N(0,1) moments") {
  RngStream r(321);
  const int n = 100000;
  double sum = 0, sumsq = 0;
  for (int i = 0; i < n; ++i) {
    double z = r.normal();
    sum += z;
    sumsq += z * z;
  }
  double mean = sum / n;
  double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(var - 1.0) < 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("uniform_int respects the bound and is roughly uniform") {
  RngStream r(9);
  const std::uint64_t bound = 7;
  std::vector<int> hist(bound, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    std::uint64_t v = r.uniform_int(bound);
    REQUIRE(v < bound);
    ++hist[v];
  }
  // Expected 10000 per bucket, sd ~ sqrt(n p (1-p)) ~ 92.6; allow 5 sd.
  for (int c : hist) CHECK(std::abs(c - n / 7.0) < 5 * std::sqrt(n * (1.0 / 7) * (6.0 / 7)));
}

TEST_CASE("string and integer splits with equal bytes stay distinct") {
  // "1" as a label must not collide with key 1.
  RngStream a = RngStream(4).split("1");
  RngStream b = RngStream(4).split(std::uint64_t{1});
  bool differ = false;
  for (int i = 0; i < 10 && !differ; ++i) differ = a.next_u64() != b.next_u64();
  CHECK(differ);
}
