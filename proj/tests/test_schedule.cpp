#include <cmath>
#include <vector>

#include "bdpo/errors.hpp"
#include "bdpo/rng.hpp"
#include "bdpo/schedule.hpp"
#include "doctest.h"

using namespace bdpo;

TEST_CASE("linear_beta satisfies the variance-preserving invariants") {
  NoiseSchedule s = NoiseSchedule::linear_beta(50, 0.005, 0.18);
  REQUIRE(s.t_steps == 50);
  REQUIRE(s.alpha_bar.size() == 51);
  CHECK(s.alpha_bar[0] == 1.0);
  CHECK(s.alpha_bar[50] > 0.0);
  for (int t = 1; t <= 50; ++t) {
    CHECK(s.alpha_bar[t] < s.alpha_bar[t - 1]);
    double a = s.alpha(t), sg = s.sigma(t);
    CHECK(std::abs(a * a + sg * sg - 1.0) <= 1e-12);
  }
  // endpoints of the beta ramp: 1 - abar[1]/abar[0] = beta_min and
  // 1 - abar[50]/abar[49] = beta_max.
  CHECK(1.0 - s.step_alpha(1) == doctest::Approx(0.005).epsilon(1e-12));
  CHECK(1.0 - s.step_alpha(50) == doctest::Approx(0.18).epsilon(1e-12));
}

TEST_CASE("snr decreases strictly in t") {
  NoiseSchedule s = NoiseSchedule::linear_beta(50, 0.005, 0.18);
  for (int t = 2; t <= 50; ++t) CHECK(s.snr(t) < s.snr(t - 1));
  CHECK(s.snr(1) == doctest::Approx(s.alpha_bar[1] / (1 - s.alpha_bar[1])));
}

TEST_CASE("from_alpha_bar validates its input") {
  CHECK_NOTHROW((void)NoiseSchedule::from_alpha_bar({1.0, 0.5, 0.25}));
  CHECK_THROWS_AS((void)NoiseSchedule::from_alpha_bar({0.99, 0.5}), ValidationError);
  CHECK_THROWS_AS((void)NoiseSchedule::from_alpha_bar({1.0, 0.5, 0.5}), ValidationError);
  CHECK_THROWS_AS((void)NoiseSchedule::from_alpha_bar({1.0, 0.5, 0.0}), ValidationError);
  CHECK_THROWS_AS((void)NoiseSchedule::from_alpha_bar({1.0}), ValidationError);
}

TEST_CASE("accessors reject out-of-range t") {
  NoiseSchedule s = NoiseSchedule::linear_beta(10, 0.01, 0.1);
  // alpha/sigma admit t=0 (the sampler's abar_{t-1} lookup); snr and
  // step_alpha start at 1.
  CHECK(s.alpha(0) == 1.0);
  CHECK(s.sigma(0) == 0.0);
  CHECK_THROWS_AS((void)s.alpha(-1), ValidationError);
  CHECK_THROWS_AS((void)s.alpha(11), ValidationError);
  CHECK_THROWS_AS((void)s.snr(0), ValidationError);
  CHECK_THROWS_AS((void)s.step_alpha(0), ValidationError);
  CHECK_THROWS_AS((void)s.step_alpha(11), ValidationError);
}

TEST_CASE("forward_noise in the signal-dominant limit returns nearly x0") {
  NoiseSchedule s = NoiseSchedule::from_alpha_bar({1.0, 1.0 - 1e-12});
  std::vector<double> x0{1.5, -2.0}, eps{3.0, 3.0};
  auto xt = forward_noise(s, x0, 1, eps);
  CHECK(std::abs(xt[0] - x0[0]) < 1e-5);
  CHECK(std::abs(xt[1] - x0[1]) < 1e-5);
}

TEST_CASE("forward_noise with zero eps scales exactly by alpha") {
  NoiseSchedule s = NoiseSchedule::linear_beta(20, 0.01, 0.2);
  std::vector<double> x0{0.7, -0.3}, eps{0.0, 0.0};
  for (int t : {1, 7, 20}) {
    auto xt = forward_noise(s, x0, t, eps);
    CHECK(xt[0] == s.alpha(t) * x0[0]);
    CHECK(xt[1] == s.alpha(t) * x0[1]);
  }
  CHECK_THROWS_AS((void)forward_noise(s, x0, 0, eps), ValidationError);
  CHECK_THROWS_AS((void)forward_noise(s, x0, 21, eps), ValidationError);
}

TEST_CASE("forward_noise matches the marginal moments") {
  NoiseSchedule s = NoiseSchedule::linear_beta(50, 0.005, 0.18);
  const int t = 23, n = 100000;
  std::vector<double> x0{1.2, -0.8};
  RngStream rng(777);
  double sum0 = 0, sum1 = 0, sq0 = 0, sq1 = 0;
  for (int i = 0; i < n; ++i) {
    std::vector<double> eps{rng.normal(), rng.normal()};
    auto xt = forward_noise(s, x0, t, eps);
    sum0 += xt[0];
    sum1 += xt[1];
    sq0 += xt[0] * xt[0];
    sq1 += xt[1] * xt[1];
  }
  double m0 = sum0 / n, m1 = sum1 / n;
  double v0 = sq0 / n - m0 * m0, v1 = sq1 / n - m1 * m1;
  double sd = s.sigma(t);
  double se_mean = sd / std::sqrt(static_cast<double>(n));
  double se_var = sd * sd * std::sqrt(2.0 / n);
  CHECK(std::abs(m0 - s.alpha(t) * x0[0]) < 3 * se_mean);
  CHECK(std::abs(m1 - s.alpha(t) * x0[1]) < 3 * se_mean);
  CHECK(std::abs(v0 - sd * sd) < 3 * se_var);
  CHECK(std::abs(v1 - sd * sd) < 3 * se_var);
}
