#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "bdpo/errors.hpp"
#include "bdpo/text.hpp"
#include "doctest.h"

using namespace bdpo;

TEST_CASE("format_double round-trips arbitrary doubles exactly") {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> expo(-300, 300);
  for (int i = 0; i < 2000; ++i) {
    double x = std::ldexp(mant(gen), expo(gen));
    CHECK(parse_double(format_double(x)) == x);
  }
  CHECK(parse_double(format_double(0.0)) == 0.0);
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(0.1) == "0.1");
}

TEST_CASE("parse_double rejects junk") {
  CHECK_THROWS_AS((void)parse_double(""), ValidationError);
  CHECK_THROWS_AS((void)parse_double("1.5x"), ValidationError);
  CHECK_THROWS_AS((void)parse_double("nan or so"), ValidationError);
  CHECK(parse_double("-2.5e-3") == -2.5e-3);
}

TEST_CASE("parse_int and parse_uint are strict") {
  CHECK(parse_int("-42") == -42);
  CHECK(parse_uint("42") == 42u);
  CHECK_THROWS_AS((void)parse_int("42.0"), ValidationError);
  CHECK_THROWS_AS((void)parse_int(""), ValidationError);
  CHECK_THROWS_AS((void)parse_uint("-1"), ValidationError);
  CHECK_THROWS_AS((void)parse_int("99999999999999999999999"), ValidationError);
}

TEST_CASE("split and trim") {
  auto parts = split("a,b,,c", ',');
  REQUIRE(parts.size() == 4);
  CHECK(parts[0] == "a");
  CHECK(parts[2] == "");
  CHECK(split("", ',').size() == 1);
  CHECK(trim("  x y\t") == "x y");
  CHECK(trim("") == "");
}

TEST_CASE("fnv1a64 is stable across calls and input-sensitive") {
  CHECK(fnv1a64("abc") == fnv1a64("abc"));
  CHECK(fnv1a64("abc") != fnv1a64("abd"));
  CHECK(fnv1a64("") != fnv1a64("a"));
}
