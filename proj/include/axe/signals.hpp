#pragma once

#include <Eigen/Core>

#include "axe/math.hpp"

namespace axe::signals {

/// Mean-reverting (Ornstein-Uhlenbeck) signal parameters, in day units:
/// kappa is the reversion rate (1/day), xbar the long-run level and eta the
/// diffusion variance rate. kappa == 0 degenerates to arithmetic Brownian
/// motion.
struct OuParams {
  double kappa = 0.0;
  double xbar = 0.0;
  double eta = 0.0;

  /// Reversion expressed as a time scale, the way configs state it
  /// ("30 minute reversion"). unit_variance picks eta = 2*kappa so the
  /// stationary variance is exactly 1 (z-score processes).
  static OuParams from_reversion_time(double reversion_days,
                                      bool unit_variance = true,
                                      double xbar = 0.0);

  double stationary_variance() const;
  void validate() const;
};

/// Trading-session clock. The day closes at T, the session runs over
/// [t_open, T] in n_steps decision intervals of length dt, and t_open is
/// derived as T - n_steps*dt so the grid closes the session exactly.
struct TimeGrid {
  double T = 1.0;
  double t_open = 0.0;
  double dt = 0.0;
  int n_steps = 0;

  static TimeGrid session(double T, int n_steps, double dt);

  double time_at(int step) const { return t_open + step * dt; }
  double horizon() const { return 2.0 * T; }
  void validate() const;
};

/// Instantaneous signal snapshot: slow and fast intraday z-scores plus the
/// constant-within-day drift.
struct SignalState {
  double epsilon = 0.0;
  double epsilon_fast = 0.0;
  double alpha_daily = 0.0;
};

/// Conditional mean and variance of the integrated future signal.
struct GainMoments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Conditional mean/variance of the signal at time s given value x at time
/// t <= s. Exact for every step size; kappa == 0 uses the Brownian limit.
struct OuMoments {
  double mean = 0.0;
  double variance = 0.0;
};

OuMoments ou_conditional_moments(const OuParams& p, double x, double t,
                                 double s);

/// One exact-in-distribution transition over dt driven by a unit normal
/// draw z supplied by the caller.
double ou_step(const OuParams& p, double x, double dt, double z);

/// Expected cumulative signal from t to horizon_end:
///   g = xbar*(H-t) + (x-xbar)/kappa * (1 - exp(-kappa(H-t)))
/// with the analytic small-kappa limit g = x*(H-t).
double integrated_gain(const OuParams& p, double x, double t,
                       double horizon_end);

/// Conditional mean M(s) and variance S2(s) of the remaining gain
/// g(s, x_s) given x_t = x, for t <= s <= horizon_end.
GainMoments gain_moments(const OuParams& p, double x, double t, double s,
                         double horizon_end);

/// Max |d/dt g + mu dg/dx + eta/2 d2g/dx2 + x| over the supplied points,
/// evaluated with central finite differences of step h. `gain` is the
/// candidate gain surface; test hook for PDE consistency and negative
/// controls.
double gain_pde_residual(const OuParams& p,
                         const std::function<double(double, double)>& gain,
                         const Eigen::ArrayXd& t_points,
                         const Eigen::ArrayXd& x_points, double h = 1e-4);

/// Same residual for the analytic OU gain with the given horizon.
double gain_pde_residual(const OuParams& p, double horizon_end,
                         const Eigen::ArrayXd& t_points,
                         const Eigen::ArrayXd& x_points, double h = 1e-4);

/// Intraday alpha from a unit z-score: x = beta * sqrt(nu) * eps.
double zscore_alpha(double beta, double nu, double epsilon);

/// Risk aversion implied by a daily target's annualized Sharpe and vol.
double calibrate_lambda(double annual_sharpe, double annual_vol);

/// Signal loading implied by the annualized Sharpe of the ideal fast
/// position: beta = sharpe / sqrt(252 T).
double calibrate_beta(double annual_sharpe, double day_length);

}  // namespace axe::signals
