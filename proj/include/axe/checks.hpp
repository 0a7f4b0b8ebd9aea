#pragma once

#include <string>
#include <vector>

#include "axe/config.hpp"

namespace axe::checks {

struct CheckResult {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Residual suite for the closed-form machinery: gain PDE, Riccati ODE of
/// the quadratic-cost V2, the full quadratic-cost HJB on a (t, x, q) grid,
/// and the deterministic Euler-Lagrange system.
std::vector<CheckResult> run_exact_checks(const config::ExactCheckSpec& spec,
                                          const signals::TimeGrid& tg);

struct DetCompareResult {
  double impact = 0.0;
  double sup_error = 0.0;
  double stop_time = 0.0;
  bool stops_after_close = false;
};

/// Analytic stopping trajectories against the discrete convex optimizer at
/// decision-grid resolution, one entry per impact value.
std::vector<DetCompareResult> run_det_compare(
    const config::DetCompareSpec& spec, const signals::TimeGrid& tg);

struct ExpansionCompareResult {
  double impact = 0.0;
  double err_order0 = 0.0;  // sup |grid band - leading-order band|
  double err_order1 = 0.0;  // sup |grid band - corrected band|
};

/// Grid-solver band edges against the expansion at orders 0 and 1 over the
/// configured (t, x) window.
std::vector<ExpansionCompareResult> run_expansion_compare(
    const config::ExpansionCompareSpec& spec, const signals::TimeGrid& tg);

}  // namespace axe::checks
