#include <doctest.h>

#include <cmath>
#include <vector>

#include "axe/math.hpp"
#include "axe/signals.hpp"
#include "support/helpers.hpp"

using namespace axe;
using namespace axe::signals;

namespace {
const OuParams kUnit{1.0, 0.0, 2.0};  // kappa 1, mean 0, stationary var 1
}

TEST_CASE("ou conditional moments: zero elapsed time") {
  const auto m = ou_conditional_moments({1.0, 0.0, 2.0}, 3.0, 0.0, 0.0);
  CHECK(m.mean == 3.0);
  CHECK(m.variance == 0.0);
}

TEST_CASE("ou conditional moments: stationary limit") {
  const auto m = ou_conditional_moments({1.0, 0.0, 2.0}, 3.0, 0.0, 40.0);
  CHECK(m.mean == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(m.variance == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ou conditional moments: brownian limit at kappa 0") {
  const auto m = ou_conditional_moments({0.0, 0.0, 2.0}, 3.0, 0.0, 2.0);
  CHECK(m.mean == 3.0);
  CHECK(m.variance == doctest::Approx(4.0));
}

TEST_CASE("ou conditional moments: rejects s < t and bad params") {
  CHECK_THROWS_AS(ou_conditional_moments(kUnit, 0.0, 1.0, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(ou_conditional_moments({-1.0, 0.0, 1.0}, 0.0, 0.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("ou variance is monotone in s and capped by the stationary value") {
  NormalSampler rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const OuParams p{0.5 + 3.0 * rng.uniform(), rng.normal(),
                     0.1 + rng.uniform()};
    double prev = 0.0;
    for (int i = 1; i <= 20; ++i) {
      const double s = 0.3 * i;
      const double v = ou_conditional_moments(p, 0.0, 0.0, s).variance;
      CHECK(v >= prev - 1e-15);
      CHECK(v <= p.eta / (2.0 * p.kappa) + 1e-12);
      prev = v;
    }
  }
}

TEST_CASE("ou step: zero noise returns the conditional mean") {
  const OuParams p{2.0, 0.3, 0.5};
  CHECK(ou_step(p, 1.0, 0.25, 0.0) ==
        ou_conditional_moments(p, 1.0, 0.0, 0.25).mean);
  CHECK(ou_step({0.0, 0.0, 1.0}, 0.0, 1.0, 1.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(ou_step(p, 1.0, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("ou step: sample moments match the closed form") {
  const OuParams p{3.0, -0.5, 1.4};
  const double x0 = 0.8, dt = 0.37;
  const int n = 100000;
  NormalSampler rng(99);
  std::vector<double> draws(n);
  for (double& d : draws) d = ou_step(p, x0, dt, rng.normal());
  const auto m = ou_conditional_moments(p, x0, 0.0, dt);
  const double sd = std::sqrt(m.variance);
  CHECK(std::abs(test_support::mean_of(draws) - m.mean) <
        3.0 * sd / std::sqrt(double(n)));
  CHECK(std::abs(test_support::variance_of(draws) - m.variance) <
        3.0 * m.variance * std::sqrt(2.0 / (n - 1.0)));
}

TEST_CASE("ou step composition is exact in distribution") {
  // one step over the full interval vs 16 sub-steps, two-sample KS
  const OuParams p{2.5, 0.2, 1.1};
  const double x0 = -0.4, total = 0.16;
  const int n = 10000;
  NormalSampler rng_a(1234), rng_b(4321);
  std::vector<double> one(n), many(n);
  for (int i = 0; i < n; ++i) {
    one[i] = ou_step(p, x0, total, rng_a.normal());
    double x = x0;
    for (int k = 0; k < 16; ++k) x = ou_step(p, x, total / 16.0, rng_b.normal());
    many[i] = x;
  }
  const double crit = 1.628 * std::sqrt(2.0 / n);  // 1% two-sample level
  CHECK(test_support::ks_statistic(one, many) < crit);
}

TEST_CASE("integrated gain: trivial and asymptotic values") {
  CHECK(integrated_gain({2.0, 0.0, 1.0}, 0.0, 0.3, 2.0) == 0.0);
  // fast reversion: g -> x / kappa
  CHECK(integrated_gain({48.0, 0.0, 1.0}, 0.7, 0.5, 2.0) ==
        doctest::Approx(0.7 / 48.0).epsilon(1e-9));
  CHECK_THROWS_AS(integrated_gain(kUnit, 1.0, 1.0, 0.5), std::invalid_argument);
}

TEST_CASE("integrated gain equals the quadrature of the conditional mean") {
  const OuParams p{1.7, 0.3, 0.9};
  const double x = -1.2, t = 0.4, horizon = 2.0;
  const double numeric = test_support::simpson(
      [&](double s) { return ou_conditional_moments(p, x, t, s).mean; }, t,
      horizon, 40000);
  CHECK(integrated_gain(p, x, t, horizon) ==
        doctest::Approx(numeric).epsilon(1e-8));
}

TEST_CASE("integrated gain: linear in x and zero at the horizon") {
  NormalSampler rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const OuParams p{2.0 * rng.uniform(), 0.0, 1.0};
    const double t = rng.uniform(), h = t + 1.0 + rng.uniform();
    const double x1 = rng.normal(), x2 = rng.normal(), w = rng.uniform();
    const double lhs =
        integrated_gain(p, w * x1 + (1.0 - w) * x2, t, h);
    const double rhs = w * integrated_gain(p, x1, t, h) +
                       (1.0 - w) * integrated_gain(p, x2, t, h);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    CHECK(integrated_gain(p, x1, h, h) == 0.0);
  }
}

TEST_CASE("gain moments: endpoints") {
  const OuParams p{2.0, 0.0, 1.5};
  const double x = 0.9, t = 0.2, h = 2.0;
  const auto at_start = gain_moments(p, x, t, t, h);
  CHECK(at_start.mean == doctest::Approx(integrated_gain(p, x, t, h)));
  CHECK(at_start.variance == 0.0);
  const auto at_end = gain_moments(p, x, t, h, h);
  CHECK(at_end.mean == doctest::Approx(0.0));
  CHECK(at_end.variance == doctest::Approx(0.0));
  CHECK_THROWS_AS(gain_moments(p, x, 0.5, 0.4, h), std::invalid_argument);
}

TEST_CASE("gain moments: mean equals gain at the conditional mean path") {
  NormalSampler rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const OuParams p{0.5 + 4.0 * rng.uniform(), 0.3 * rng.normal(),
                     0.2 + rng.uniform()};
    const double t = 0.1, h = 2.0;
    const double s = t + (h - t) * rng.uniform();
    const double x = rng.normal();
    const auto gm = gain_moments(p, x, t, s, h);
    const double mean_path = ou_conditional_moments(p, x, t, s).mean;
    CHECK(gm.mean ==
          doctest::Approx(integrated_gain(p, mean_path, s, h)).epsilon(1e-11));
  }
}

TEST_CASE("gain moments match monte carlo over exact paths") {
  const OuParams p{4.0, 0.0, 0.8};
  const double x0 = 0.6, t = 0.3, s = 0.9, h = 2.0;
  const int n = 100000, sub = 8;
  NormalSampler rng(2024);
  std::vector<double> gains(n);
  for (int i = 0; i < n; ++i) {
    double x = x0;
    for (int k = 0; k < sub; ++k)
      x = ou_step(p, x, (s - t) / sub, rng.normal());
    gains[i] = integrated_gain(p, x, s, h);
  }
  const auto gm = gain_moments(p, x0, t, s, h);
  const double sd = std::sqrt(gm.variance);
  CHECK(std::abs(test_support::mean_of(gains) - gm.mean) <
        3.0 * sd / std::sqrt(double(n)));
  CHECK(std::abs(test_support::variance_of(gains) - gm.variance) <
        3.0 * gm.variance * std::sqrt(2.0 / (n - 1.0)));
}

TEST_CASE("gain pde residual: analytic gain passes, corrupted gain fails") {
  const OuParams p{2.0, 0.3, 0.9};
  const double h = 2.0;
  const Eigen::ArrayXd ts = Eigen::ArrayXd::LinSpaced(7, 0.1, 0.9);
  const Eigen::ArrayXd xs = Eigen::ArrayXd::LinSpaced(7, -1.5, 1.5);
  CHECK(gain_pde_residual(p, h, ts, xs) < 1e-6);

  // zero-signal slice of a zero-mean process is exact up to discretization
  const OuParams zero_mean{2.0, 0.0, 0.9};
  const Eigen::ArrayXd x0 = Eigen::ArrayXd::Zero(1);
  CHECK(gain_pde_residual(zero_mean, h, ts, x0) < 1e-9);

  auto corrupted = [&](double t, double x) {
    return integrated_gain(p, x, t, h) + 1e-3 * x * x;
  };
  CHECK(gain_pde_residual(p, corrupted, ts, xs) > 1e-4);
}

TEST_CASE("gain pde residual vanishes at second order in the step") {
  const OuParams p{2.0, 0.3, 0.9};
  const Eigen::ArrayXd ts = Eigen::ArrayXd::LinSpaced(5, 0.2, 0.8);
  const Eigen::ArrayXd xs = Eigen::ArrayXd::LinSpaced(5, -1.0, 1.0);
  // the closed form has no x-curvature, so push the step until the
  // time-direction truncation dominates and check the h^2 scaling
  const double r1 = gain_pde_residual(p, 2.0, ts, xs, 2e-2);
  const double r2 = gain_pde_residual(p, 2.0, ts, xs, 1e-2);
  CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("zscore alpha") {
  CHECK(zscore_alpha(1.0, 0.01, 0.0) == 0.0);
  CHECK(zscore_alpha(1.0, 0.01, 1.0) == doctest::Approx(0.1));
  CHECK(zscore_alpha(13.0, 0.01, -2.0) == doctest::Approx(-2.6));
  CHECK_THROWS_AS(zscore_alpha(1.0, -0.01, 1.0), std::invalid_argument);
}

TEST_CASE("calibrations") {
  CHECK(calibrate_lambda(2.0, 1.0) == doctest::Approx(2.0));
  CHECK(calibrate_lambda(0.0, 3.0) == 0.0);
  CHECK_THROWS_AS(calibrate_lambda(1.0, 0.0), std::invalid_argument);

  CHECK(calibrate_beta(0.0, 1.0) == 0.0);
  CHECK(calibrate_beta(16.5, 1.0) == doctest::Approx(1.0394).epsilon(1e-4));
  CHECK_THROWS_AS(calibrate_beta(1.0, 0.0), std::invalid_argument);

  NormalSampler rng(3);
  for (int i = 0; i < 50; ++i) {
    const double beta = rng.uniform() * 3.0, T = 0.5 + rng.uniform();
    CHECK(calibrate_beta(beta * std::sqrt(252.0 * T), T) ==
          doctest::Approx(beta).epsilon(1e-12));
  }
}

TEST_CASE("time grid closes the session exactly") {
  const auto tg = TimeGrid::session(1.0, 390, 1.0 / 1440.0);
  CHECK(std::abs(tg.t_open + tg.n_steps * tg.dt - tg.T) <= 1e-12);
  CHECK(tg.t_open > 0.0);
  CHECK_THROWS_AS(TimeGrid::session(1.0, 1441, 1.0 / 1440.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(TimeGrid::session(1.0, 10, -1.0), std::invalid_argument);
}
