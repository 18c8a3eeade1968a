#include <cmath>
#include <random>

#include "bdpo/counters.hpp"
#include "bdpo/errors.hpp"
#include "bdpo/rewards.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace bdpo;

TEST_CASE("reference values of the four kinds") {
  RewardSpec target{"t", RewardKind::target_proximity, 1.0, {{2.0, 0.0}}, 1.0};
  CHECK(evaluate(target, {0}, {{2.0, 0.0}}) == 1.0);  // exp(0) at the target

  RewardSpec compact{"c", RewardKind::compactness, 1.0, {}, 1.0};
  CHECK(evaluate(compact, {0}, {{0.0, 0.0}}) == 0.0);

  RewardSpec ring{"r", RewardKind::ring_fit, 100.0, {}, 1.0};
  CHECK(evaluate(ring, {0}, {{1.0, 0.0}}) == 0.0);  // on the ring

  RewardSpec axis{"a", RewardKind::axis_preference, 1.0, {}, 1.0};
  CHECK(evaluate(axis, {0}, {{-1.5, 7.0}}) == -1.5);
}

TEST_CASE("unit-scale registry at the origin") {
  RewardRegistry reg;
  reg.specs = {
      {"m_target", RewardKind::target_proximity, 1.0, {{2.0, 0.0}}, 1.0},
      {"m_compact", RewardKind::compactness, 1.0, {}, 1.0},
      {"m_axis", RewardKind::axis_preference, 1.0, {}, 1.0},
      {"m_ring", RewardKind::ring_fit, 1.0, {}, 1.0},
  };
  ScoreVector s = score_all(reg, {0}, {{0.0, 0.0}});
  REQUIRE(s.values.size() == 4);
  CHECK(s.values[0] == doctest::Approx(std::exp(-4.0)).epsilon(1e-12));
  CHECK(s.values[1] == 0.0);
  CHECK(s.values[2] == 0.0);
  CHECK(s.values[3] == -1.0);
  CHECK(s.metric_ids == reg.metric_ids());
}

TEST_CASE("K=1 registry yields a length-1 score vector") {
  RewardRegistry reg;
  reg.specs = {{"only", RewardKind::compactness, 2.0, {}, 1.0}};
  ScoreVector s = score_all(reg, {0}, {{1.0, 1.0}});
  REQUIRE(s.values.size() == 1);
  CHECK(s.values[0] == -4.0);
}

TEST_CASE("score_all performs exactly K reward evaluations") {
  RewardRegistry reg = default_registry(4, 2);
  counters::reset();
  (void)score_all(reg, {1}, {{0.3, -0.4}});
  CHECK(counters::reward_evaluations.load() == 4);
}

TEST_CASE("scale acts multiplicatively") {
  std::mt19937_64 gen(5);
  for (int i = 0; i < 50; ++i) {
    Sample x{testkit::random_vec(gen, 2)};
    for (RewardKind kind : {RewardKind::target_proximity, RewardKind::compactness,
                            RewardKind::axis_preference, RewardKind::ring_fit}) {
      RewardSpec unit{"u", kind, 1.0, {{0.5, -0.5}}, 0.7};
      RewardSpec scaled = unit;
      scaled.scale = 31.25;
      CHECK(evaluate(scaled, {0}, x) == doctest::Approx(31.25 * evaluate(unit, {0}, x)));
    }
  }
}

TEST_CASE("positive scaling preserves the score ordering of two samples") {
  std::mt19937_64 gen(6);
  RewardRegistry reg = default_registry(3, 2);
  for (int i = 0; i < 200; ++i) {
    Sample a{testkit::random_vec(gen, 2)}, b{testkit::random_vec(gen, 2)};
    Condition c{static_cast<int>(gen() % 3)};
    for (const RewardSpec& spec : reg.specs) {
      RewardSpec rescaled = spec;
      rescaled.scale *= 17.0;
      double da = evaluate(spec, c, a) - evaluate(spec, c, b);
      double db = evaluate(rescaled, c, a) - evaluate(rescaled, c, b);
      CHECK(((da > 0) == (db > 0)));
      CHECK(((da < 0) == (db < 0)));
    }
  }
}

TEST_CASE("circle means are equally spaced at the requested radius") {
  auto means = circle_means(4, 3, 2.0);
  REQUIRE(means.size() == 4);
  for (const auto& mu : means) {
    REQUIRE(mu.size() == 3);
    CHECK(std::hypot(mu[0], mu[1]) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(mu[2] == 0.0);
  }
  CHECK(means[0][0] == doctest::Approx(2.0));
  CHECK(std::abs(means[1][0]) < 1e-12);
  CHECK(means[1][1] == doctest::Approx(2.0));
}

TEST_CASE("default registry matches its documented shape") {
  RewardRegistry reg = default_registry(4, 2);
  REQUIRE(reg.size() == 4);
  CHECK(reg.metric_ids() ==
        std::vector<std::string>{"m_target", "m_compact", "m_axis", "m_ring"});
  CHECK(reg.specs[0].scale == 1.0);
  CHECK(reg.specs[1].scale == 100.0);
  CHECK(reg.specs[2].scale == 0.01);
  CHECK(reg.specs[3].scale == 1000.0);
  CHECK_NOTHROW(validate_registry(reg, 4, 2));
  CHECK(reg.index_of("m_axis") == 2);
  CHECK_THROWS_AS((void)reg.index_of("nope"), ValidationError);
}

TEST_CASE("validate_registry rejects broken specs") {
  RewardRegistry reg = default_registry(4, 2);

  RewardRegistry dup = reg;
  dup.specs[1].metric_id = "m_target";
  CHECK_THROWS_AS(validate_registry(dup, 4, 2), ValidationError);

  RewardRegistry bad_scale = reg;
  bad_scale.specs[0].scale = 0.0;
  CHECK_THROWS_AS(validate_registry(bad_scale, 4, 2), ValidationError);

  RewardRegistry few_targets = reg;
  few_targets.specs[0].targets.pop_back();
  CHECK_THROWS_AS(validate_registry(few_targets, 4, 2), ValidationError);

  RewardRegistry bad_rho = reg;
  bad_rho.specs[3].rho = -1.0;
  CHECK_THROWS_AS(validate_registry(bad_rho, 4, 2), ValidationError);

  RewardRegistry empty;
  CHECK_THROWS_AS(validate_registry(empty, 4, 2), ValidationError);
}
