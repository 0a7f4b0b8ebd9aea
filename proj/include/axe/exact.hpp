#pragma once

#include <Eigen/Core>

#include "axe/policy.hpp"
#include "axe/signals.hpp"

namespace axe::exact {

using policy::MarketParams;
using signals::OuParams;
using signals::TimeGrid;

struct StartsInsideZoneError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Side { FromSell, FromBuy };

/// Optimal trajectory for a volatility-free mean-reverting signal: the
/// closed-form solution of the Euler-Lagrange equation
///   2K qdd = lambda nu (q - q_bar) - x0 exp(-kappa (s-t)),
/// trading from q_start at start_time until the stopping time where the
/// velocity vanishes on the no-trade edge. The growing exponential mode is
/// stored pre-scaled by exp(A (stop-start)) so evaluation never overflows
/// for fast (small K) regimes.
struct DetTrajectory {
  Side side = Side::FromSell;
  double start_time = 0.0;
  double stop_time = 0.0;   // t-hat solving the stopping system
  double q_start = 0.0;
  double q_bar = 0.0;
  double signal_start = 0.0;
  double kappa = 0.0;
  double decay_rate = 0.0;  // A = sqrt(lambda nu / (2K))
  double impact = 0.0;      // K
  double lam_nu = 0.0;
  double half_spread = 0.0;
  double horizon = 0.0;     // 2T
  bool resonant = false;    // 2 K kappa^2 == lambda nu within tolerance
  double coeff_grow_scaled = 0.0;  // c+ * exp(A (stop-start))
  double coeff_decay = 0.0;        // c-
  double particular = 0.0;         // forced-mode coefficient
  double integration_constant = 0.0;  // growth coefficient in absolute time
  bool stops_after_close = false;     // stop_time > T, reported not clipped
  bool leaves_band_after_stop = false;
  // The stopping system admits solutions whose interior arc briefly trades
  // against the region's direction (fast-impact regimes with a strong
  // signal); such an arc is not the true optimum, whose initial phase holds
  // instead. Reported, not resolved: the stop value itself still agrees
  // with the discrete optimizer.
  bool non_monotone = false;

  /// Position along the optimal path; constant at the stopped value for
  /// s >= stop_time.
  double position_at(double s) const;
  /// dq/ds along the path (zero after the stop).
  double velocity_at(double s) const;
  /// Remaining deterministic gain of the signal from time s.
  double gain_at(double s) const;
  /// Boundary of the originating trading region at time s.
  double boundary_at(double s) const;
};

/// Solves the stopping system (zero terminal velocity, terminal position on
/// the region edge) for the deterministic signal x(s) = x0 exp(-kappa(s-t)).
/// The signal parameters must describe a noiseless, zero-mean process
/// (eta == 0, xbar == 0). Throws StartsInsideZoneError when q0 already lies
/// strictly inside the no-trade band and NoConvergenceError when no stopping
/// time exists before the horizon.
DetTrajectory det_trajectory_solve(double q0, double x0, double t,
                                   const MarketParams& mp, const TimeGrid& tg,
                                   const OuParams& ou);

/// Edge of the originating trading region at the stopping time, from the
/// deterministic gain there. Identical in form to the stochastic band; the
/// deterministic boundaries do not depend on the impact exponent.
double det_boundary(double t_hat, double gain_at_stop, const MarketParams& mp,
                    const TimeGrid& tg, Side side);

/// Max absolute residual of the interior Euler-Lagrange equation
///   -2K qdd + gdot + lambda nu (q - q_bar)
/// along the trajectory, with qdd from five-point central differences.
double det_euler_lagrange_residual(const DetTrajectory& traj, int n_points,
                                   double h = 2e-4);

/// Same residual for a power-law impact cost K |u|^p:
///   -pK d/ds[sign(qd) |qd|^(p-1)] + gdot + lambda nu (q - q_bar).
double det_euler_lagrange_residual_power(const DetTrajectory& traj, double p,
                                         int n_points, double h = 2e-4);

/// Residuals of the two stopping conditions (velocity and boundary match at
/// stop_time); these, unlike the interior equation, detect perturbations of
/// the integration constant.
std::pair<double, double> det_stopping_residual(const DetTrajectory& traj);

/// Returns a copy whose growth-mode integration constant is shifted by da
/// (in absolute-time convention); negative-control hook.
DetTrajectory with_integration_constant_shift(const DetTrajectory& traj,
                                              double da);

/// Returns a copy whose forced-mode coefficient is scaled by (1 + rel);
/// breaks the interior equation, unlike a homogeneous-mode shift.
DetTrajectory with_particular_scaled(const DetTrajectory& traj, double rel);

/// Quadratic-ansatz objective for zero linear cost:
///   V = V0(t,x) + V1(t,x)(q - q_bar) + V2(t)(q - q_bar)^2,
/// V2 in closed form, V1 and V0 by quadrature of their expectation
/// representations under the Gaussian law of the remaining gain.
class QuadCostValue {
 public:
  QuadCostValue(const MarketParams& mp, const OuParams& ou,
                const TimeGrid& tg);

  double v2(double t) const;
  double v1(double t, double x) const;
  double v0(double t, double x) const;
  /// exp(-(1/K) int_t^s V2), the Riccati discount factor, in closed form.
  double discount(double t, double s) const;
  /// Full objective value at (t, x, q).
  double value(double t, double x, double q) const;

  double day_close() const { return T_; }
  double horizon() const { return horizon_; }
  const OuParams& signal() const { return ou_; }
  const MarketParams& market() const { return mp_; }

 private:
  // (gain and first-order coefficient as functions of calendar time)
  double gain_slope(double s) const;   // d g(s, x)/dx
  double gain_const(double s) const;   // g(s, 0)
  double v1_slope(double s) const;     // d V1(s, x)/dx
  double v1_const(double s) const;     // V1(s, 0)

  MarketParams mp_;
  OuParams ou_;
  double T_ = 0.0;
  double horizon_ = 0.0;
  double A_ = 0.0;
};

/// Builds the quadratic-cost objective; requires zero half-spread and K > 0.
QuadCostValue quadcost_value(const MarketParams& mp, const OuParams& ou,
                             const TimeGrid& tg);

/// Optimal rate for the quadratic-cost problem:
///   u = (g - V1 - 2 V2 (q - q_bar)) / (2K).
double quadcost_rate(double t, double q, double x, const QuadCostValue& qcv);

/// Closed-form slope correction of the large-impact expansion:
///   dV1/dq = 1/2 int_t^T lam nu (2T-s) Sigma(s) *
///            [phi(L+) - phi(L-) - L+(1-Phi(L+)) - L- Phi(L-)] ds
/// with L(+/-)(s) = (+/-C + lam nu (2T-s)(q - q_bar) - M(s)) / Sigma(s).
/// Vanishing-Sigma endpoints use the analytic limit of the bracket.
double expansion_dv1_dq(double t, double q, double x, const MarketParams& mp,
                        const OuParams& ou, const TimeGrid& tg);

/// Band edges of the 1/K expansion. Order 0 is the closed-form band; order 1
/// adds (1/K) * b1 with b1 = -(dV1/dq at the order-0 edge) / (lam nu (2T-t)).
/// Returns {buy, sell}.
std::pair<double, double> expansion_boundary(double t, double x,
                                             const MarketParams& mp,
                                             const OuParams& ou,
                                             const TimeGrid& tg, int order);

/// Bundle of the expansion pieces at one state, for reporting.
struct ExpansionTerms {
  double v0 = 0.0;                       // leading-order value
  double dv1_dq = 0.0;                   // slope correction at (t, q, x)
  std::pair<double, double> b0;          // leading band {buy, sell}
  std::pair<double, double> b1;          // first-order corrections
};

ExpansionTerms expansion_terms(double t, double q, double x,
                               const MarketParams& mp, const OuParams& ou,
                               const TimeGrid& tg);

}  // namespace axe::exact
