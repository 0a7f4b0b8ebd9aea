#include "axe/signals.hpp"

#include <cmath>
#include <stdexcept>

namespace axe::signals {

namespace {
// Below this, kappa*(interval) is treated by its series limit to avoid 0/0.
constexpr double kKappaTiny = 1e-12;
}  // namespace

OuParams OuParams::from_reversion_time(double reversion_days,
                                       bool unit_variance, double xbar) {
  if (reversion_days <= 0.0)
    throw std::invalid_argument("OuParams: reversion time must be positive");
  OuParams p;
  p.kappa = 1.0 / reversion_days;
  p.xbar = xbar;
  p.eta = unit_variance ? 2.0 * p.kappa : 0.0;
  return p;
}

double OuParams::stationary_variance() const {
  if (kappa <= 0.0)
    throw std::domain_error("OuParams: no stationary variance for kappa == 0");
  return eta / (2.0 * kappa);
}

void OuParams::validate() const {
  if (!(kappa >= 0.0) || !(eta >= 0.0) || !std::isfinite(xbar))
    throw std::invalid_argument("OuParams: kappa >= 0, eta >= 0 required");
}

TimeGrid TimeGrid::session(double T, int n_steps, double dt) {
  TimeGrid tg;
  tg.T = T;
  tg.n_steps = n_steps;
  tg.dt = dt;
  tg.t_open = T - n_steps * dt;
  tg.validate();
  return tg;
}

void TimeGrid::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("TimeGrid: dt must be > 0");
  if (n_steps < 1) throw std::invalid_argument("TimeGrid: n_steps must be >= 1");
  if (!(t_open > 0.0) || !(t_open < T))
    throw std::invalid_argument("TimeGrid: t_open must lie in (0, T)");
  if (std::abs(t_open + n_steps * dt - T) > 1e-12 * std::max(1.0, T))
    throw std::invalid_argument("TimeGrid: grid does not close the session");
}

OuMoments ou_conditional_moments(const OuParams& p, double x, double t,
                                 double s) {
  p.validate();
  if (s < t)
    throw std::invalid_argument("ou_conditional_moments: s < t");
  const double ds = s - t;
  OuMoments m;
  if (p.kappa * ds < kKappaTiny) {
    m.mean = x;
    m.variance = p.eta * ds;
    return m;
  }
  const double decay = std::exp(-p.kappa * ds);
  m.mean = p.xbar + (x - p.xbar) * decay;
  // -expm1 keeps (1 - e^{-2 kappa ds}) accurate for small exponents
  m.variance = p.eta / (2.0 * p.kappa) * (-std::expm1(-2.0 * p.kappa * ds));
  return m;
}

double ou_step(const OuParams& p, double x, double dt, double z) {
  if (!(dt > 0.0)) throw std::invalid_argument("ou_step: dt must be > 0");
  const OuMoments m = ou_conditional_moments(p, x, 0.0, dt);
  return m.mean + std::sqrt(m.variance) * z;
}

double integrated_gain(const OuParams& p, double x, double t,
                       double horizon_end) {
  p.validate();
  if (horizon_end < t)
    throw std::invalid_argument("integrated_gain: horizon_end < t");
  const double h = horizon_end - t;
  if (p.kappa * h < kKappaTiny) return x * h;
  return p.xbar * h + (x - p.xbar) / p.kappa * (-std::expm1(-p.kappa * h));
}

GainMoments gain_moments(const OuParams& p, double x, double t, double s,
                         double horizon_end) {
  p.validate();
  if (s < t || horizon_end < s)
    throw std::invalid_argument("gain_moments: need t <= s <= horizon_end");
  const double rem = horizon_end - s;
  const double ds = s - t;
  GainMoments g;
  if (p.kappa * (horizon_end - t) < kKappaTiny) {
    g.mean = x * rem;
    g.variance = p.eta * ds * rem * rem;
    return g;
  }
  const double k = p.kappa;
  const double tail = -std::expm1(-k * rem);  // 1 - e^{-kappa rem}
  g.mean = p.xbar * rem + (x - p.xbar) / k * tail * std::exp(-k * ds);
  g.variance =
      p.eta / (2.0 * k * k * k) * (-std::expm1(-2.0 * k * ds)) * tail * tail;
  return g;
}

double gain_pde_residual(const OuParams& p,
                         const std::function<double(double, double)>& gain,
                         const Eigen::ArrayXd& t_points,
                         const Eigen::ArrayXd& x_points, double h) {
  p.validate();
  double worst = 0.0;
  for (double t : t_points) {
    for (double x : x_points) {
      const double gt = (gain(t + h, x) - gain(t - h, x)) / (2.0 * h);
      const double gx = (gain(t, x + h) - gain(t, x - h)) / (2.0 * h);
      const double gxx =
          (gain(t, x + h) - 2.0 * gain(t, x) + gain(t, x - h)) / (h * h);
      const double mu = p.kappa * (p.xbar - x);
      const double res = gt + mu * gx + 0.5 * p.eta * gxx + x;
      worst = std::max(worst, std::abs(res));
    }
  }
  return worst;
}

double gain_pde_residual(const OuParams& p, double horizon_end,
                         const Eigen::ArrayXd& t_points,
                         const Eigen::ArrayXd& x_points, double h) {
  return gain_pde_residual(
      p,
      [&](double t, double x) { return integrated_gain(p, x, t, horizon_end); },
      t_points, x_points, h);
}

double zscore_alpha(double beta, double nu, double epsilon) {
  if (nu < 0.0) throw std::invalid_argument("zscore_alpha: nu must be >= 0");
  return beta * std::sqrt(nu) * epsilon;
}

double calibrate_lambda(double annual_sharpe, double annual_vol) {
  if (!(annual_vol > 0.0))
    throw std::invalid_argument("calibrate_lambda: vol must be > 0");
  return annual_sharpe / annual_vol;
}

double calibrate_beta(double annual_sharpe, double day_length) {
  if (!(day_length > 0.0))
    throw std::invalid_argument("calibrate_beta: day length must be > 0");
  return annual_sharpe / std::sqrt(252.0 * day_length);
}

}  // namespace axe::signals
