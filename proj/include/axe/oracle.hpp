#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "axe/policy.hpp"
#include "axe/signals.hpp"

namespace axe::oracle {

using policy::MarketParams;
using signals::OuParams;
using signals::TimeGrid;

struct CflViolationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Discretization of the single-day execution objective on an n-step grid.
/// Positions are piecewise linear between decision times; `gains` holds the
/// per-step average of the deterministic gain so the discrete objective is a
/// second-order-accurate quadrature of the continuous functional.
struct DiscreteProblem {
  double t0 = 0.0;
  double dt = 0.0;
  int n = 0;
  double q0 = 0.0;
  double horizon = 0.0;  // risk accrues to here after the last step
  Eigen::ArrayXd gains;
  MarketParams mp;

  void validate() const;

  /// Problem for the noiseless mean-reverting signal x(s) = x0 e^{-k(s-t0)}
  /// with exact per-step gain averages.
  static DiscreteProblem for_det_signal(double q0, double x0, double t0,
                                        double t_end, int n,
                                        const MarketParams& mp,
                                        const OuParams& ou, double horizon);
};

struct DiscreteSolution {
  Eigen::ArrayXd trades;
  Eigen::ArrayXd positions;  // n+1 entries, positions[0] == q0
  double objective = 0.0;
  int iterations = 0;
  std::vector<double> objective_trace;  // accepted objective per iteration
};

/// Objective value for a candidate trade sequence.
double discrete_objective(const DiscreteProblem& prob,
                          const Eigen::ArrayXd& trades);

/// Minimizes the discrete objective by monotone accelerated proximal
/// iteration (the spread term is handled exactly by soft-thresholding).
/// Convergence is certified through the gradient-mapping bound of the
/// strongly convex smooth part; throws NoConvergenceError at the cap.
DiscreteSolution solve_discrete_deterministic(const DiscreteProblem& prob,
                                              double obj_tol = 1e-10,
                                              int max_iter = 400000);

/// Grid specification for the finite-difference HJB sweep.
struct HjbGridSpec {
  int nt = 400;  // explicit Euler steps from T back to t_open
  int nx = 41;
  int nq = 161;
  double x_halfwidth_sds = 5.0;  // domain half-width in stationary sds
  double q_lo = 0.0;
  double q_hi = 0.0;
  bool auto_q_range = true;  // derive [q_lo, q_hi] from the band extremes
  double cfl_safety = 0.4;
  int max_stored_slices = 201;
};

/// Value function and implied band edges on the (t, x, q) grid. Slices are
/// stored at a uniform stride, earliest time first.
struct GridValue {
  Eigen::ArrayXd t_grid;  // stored times, ascending
  Eigen::ArrayXd x_grid;
  Eigen::ArrayXd q_grid;
  std::vector<Eigen::MatrixXd> values;  // per stored time, rows x, cols q
  Eigen::MatrixXd boundary_buy;   // rows: stored time, cols: x (NaN if absent)
  Eigen::MatrixXd boundary_sell;
};

/// Backward explicit finite-difference sweep of the market-order HJB
/// equation with upwinded signal drift and the nonlinear trading-rate
/// source. Throws CflViolationError when the requested step count violates
/// the stability bound.
GridValue solve_hjb_grid(const MarketParams& mp, const OuParams& ou,
                         const TimeGrid& tg, const HjbGridSpec& spec);

/// Minimum step count that satisfies the stability bound for this spec.
int hjb_min_stable_steps(const MarketParams& mp, const OuParams& ou,
                         const TimeGrid& tg, const HjbGridSpec& spec);

/// Sup-norm and signed-mean distance between grid-implied and analytic band
/// edges over a (t, x) window.
struct BoundaryCompare {
  double sup_buy = 0.0;
  double sup_sell = 0.0;
  double mean_signed_buy = 0.0;
  double mean_signed_sell = 0.0;
  int n_compared = 0;
};

BoundaryCompare compare_boundaries(
    const GridValue& grid,
    const std::function<std::pair<double, double>(double, double)>& analytic,
    double t_lo, double t_hi, double x_lo, double x_hi);

}  // namespace axe::oracle
