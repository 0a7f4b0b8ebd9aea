#include "axe/exact.hpp"

#include <algorithm>
#include <cmath>

namespace axe::exact {

namespace {

double side_spread_sign(Side side) {
  // sell-side edge carries +C, buy-side -C
  return side == Side::FromSell ? 1.0 : -1.0;
}

struct StopCandidate {
  double q_stop = 0.0;
  double coeff_grow_scaled = 0.0;
  double coeff_decay = 0.0;
};

// Solves the zero-velocity condition for the mode coefficients at a given
// stop offset; all quantities stay bounded for arbitrarily large A.
StopCandidate candidate_at(double dhat, double q0, double q_bar, double A,
                           double kappa, double particular, bool resonant) {
  const double em = std::exp(-A * dhat);  // exp(-A dhat) <= 1
  double forced_value, forced_velocity, forced_at_start;
  if (resonant) {
    forced_value = particular * dhat * em;
    forced_velocity = particular * (1.0 - A * dhat) * em;
    forced_at_start = 0.0;
  } else {
    const double ek = std::exp(-kappa * dhat);
    forced_value = particular * ek;
    forced_velocity = -kappa * particular * ek;
    forced_at_start = particular;
  }
  const double r = q0 - q_bar - forced_at_start;
  const double w = -forced_velocity / A;  // c+ E - c- / E
  StopCandidate c;
  const double denom = 1.0 + em * em;
  c.coeff_grow_scaled = (w + r * em) / denom;  // = c+ * exp(A dhat)
  const double c_plus = c.coeff_grow_scaled * em;
  c.coeff_decay = r - c_plus;
  c.q_stop = q_bar + c.coeff_grow_scaled + c.coeff_decay * em + forced_value;
  return c;
}

}  // namespace

double DetTrajectory::gain_at(double s) const {
  return signal_start / kappa *
         (std::exp(-kappa * (s - start_time)) -
          std::exp(-kappa * (horizon - start_time)));
}

double DetTrajectory::boundary_at(double s) const {
  return q_bar + (gain_at(s) + side_spread_sign(side) * half_spread) /
                     (lam_nu * (horizon - s));
}

double DetTrajectory::position_at(double s) const {
  const double dhat = stop_time - start_time;
  const double ds = std::clamp(s - start_time, 0.0, dhat);
  const double grow = coeff_grow_scaled * std::exp(-decay_rate * (dhat - ds));
  const double decay = coeff_decay * std::exp(-decay_rate * ds);
  const double forced =
      resonant ? particular * ds * std::exp(-decay_rate * ds)
               : particular * std::exp(-kappa * ds);
  return q_bar + grow + decay + forced;
}

double DetTrajectory::velocity_at(double s) const {
  const double dhat = stop_time - start_time;
  if (s - start_time > dhat) return 0.0;
  const double ds = std::max(s - start_time, 0.0);
  const double grow =
      decay_rate * coeff_grow_scaled * std::exp(-decay_rate * (dhat - ds));
  const double decay = -decay_rate * coeff_decay * std::exp(-decay_rate * ds);
  const double forced =
      resonant
          ? particular * (1.0 - decay_rate * ds) * std::exp(-decay_rate * ds)
          : -kappa * particular * std::exp(-kappa * ds);
  return grow + decay + forced;
}

DetTrajectory det_trajectory_solve(double q0, double x0, double t,
                                   const MarketParams& mp, const TimeGrid& tg,
                                   const OuParams& ou) {
  mp.validate();
  ou.validate();
  if (ou.eta != 0.0)
    throw std::invalid_argument("det_trajectory_solve: signal must be noiseless");
  if (ou.xbar != 0.0)
    throw std::invalid_argument("det_trajectory_solve: signal mean must be zero");
  if (!(ou.kappa > 0.0))
    throw std::invalid_argument("det_trajectory_solve: kappa must be > 0");
  if (!(mp.impact > 0.0))
    throw std::invalid_argument("det_trajectory_solve: K must be > 0");

  const double lam_nu = mp.risk_aversion * mp.nu;
  const double horizon = 2.0 * tg.T;
  const double A = std::sqrt(lam_nu / (2.0 * mp.impact));
  const bool resonant =
      std::abs(2.0 * mp.impact * ou.kappa * ou.kappa - lam_nu) <
      1e-10 * lam_nu;

  DetTrajectory traj;
  traj.start_time = t;
  traj.q_start = q0;
  traj.q_bar = mp.q_bar;
  traj.signal_start = x0;
  traj.kappa = ou.kappa;
  traj.decay_rate = A;
  traj.impact = mp.impact;
  traj.lam_nu = lam_nu;
  traj.half_spread = mp.half_spread;
  traj.horizon = horizon;
  traj.resonant = resonant;
  traj.particular =
      resonant ? x0 / (4.0 * mp.impact * A)
               : -x0 / (2.0 * mp.impact * ou.kappa * ou.kappa - lam_nu);

  // which region do we start from?
  const auto [b_buy, b_sell] = policy::nt_boundaries(
      t, signals::integrated_gain(ou, x0, t, horizon), mp, tg);
  const double scale = std::max({1.0, std::abs(q0), std::abs(mp.q_bar)});
  if (q0 >= b_sell - 1e-12 * scale) {
    traj.side = Side::FromSell;
  } else if (q0 <= b_buy + 1e-12 * scale) {
    traj.side = Side::FromBuy;
  } else {
    throw StartsInsideZoneError(
        "det_trajectory_solve: start position already inside the band");
  }

  const double start_gap = q0 - traj.boundary_at(t);
  if (std::abs(start_gap) <= 1e-12 * scale) {
    // already on the edge: stop immediately
    traj.stop_time = t;
    traj.coeff_grow_scaled = 0.0;
    traj.coeff_decay = q0 - mp.q_bar - (resonant ? 0.0 : traj.particular);
    traj.integration_constant = 0.0;
    return traj;
  }

  auto stop_mismatch = [&](double dhat) {
    const StopCandidate c = candidate_at(dhat, q0, mp.q_bar, A, ou.kappa,
                                         traj.particular, resonant);
    return c.q_stop - traj.boundary_at(t + dhat);
  };

  // bracket the first stopping time on a log-spaced sweep
  const double d_max = horizon - t - 1e-6;
  const int n_scan = 400;
  double d_lo = 0.0, f_lo = start_gap;  // limit of the mismatch as dhat -> 0
  double d_hi = -1.0, f_hi = 0.0;
  for (int i = 0; i <= n_scan; ++i) {
    const double d =
        d_max * std::exp(-18.0 * (1.0 - static_cast<double>(i) / n_scan));
    const double f = stop_mismatch(d);
    if (f == 0.0 || f * f_lo < 0.0) {
      d_hi = d;
      f_hi = f;
      break;
    }
    d_lo = d;
    f_lo = f;
  }
  if (d_hi < 0.0)
    throw NoConvergenceError(
        "det_trajectory_solve: no stopping time before the horizon");

  const double dhat =
      (f_hi == 0.0)
          ? d_hi
          : brent_root(stop_mismatch, std::max(d_lo, d_max * 1e-14), d_hi,
                       1e-14);
  const StopCandidate c = candidate_at(dhat, q0, mp.q_bar, A, ou.kappa,
                                       traj.particular, resonant);
  traj.stop_time = t + dhat;
  traj.coeff_grow_scaled = c.coeff_grow_scaled;
  traj.coeff_decay = c.coeff_decay;
  traj.integration_constant =
      c.coeff_grow_scaled * std::exp(-A * traj.stop_time);
  traj.stops_after_close = traj.stop_time > tg.T + 1e-12;

  // report interior arcs that trade against the region's direction
  const double dir = traj.side == Side::FromSell ? -1.0 : 1.0;
  const double v_tol = 1e-9 * (1.0 + std::abs(q0 - mp.q_bar) * A);
  for (int i = 0; i <= 200; ++i) {
    const double s = t + dhat * i / 200.0;
    if (dir * traj.velocity_at(s) < -v_tol) {
      traj.non_monotone = true;
      break;
    }
  }

  // report if the frozen post-stop position would drift out of the band
  if (!traj.stops_after_close) {
    const double q_stop = traj.position_at(traj.stop_time);
    const int n_check = 64;
    for (int i = 1; i <= n_check; ++i) {
      const double s =
          traj.stop_time + (tg.T - traj.stop_time) * i / n_check;
      const auto [lo, hi] = policy::nt_boundaries(
          s, signals::integrated_gain(ou, x0 * std::exp(-ou.kappa * (s - t)),
                                      s, horizon),
          mp, tg);
      if (q_stop < lo - 1e-9 * scale || q_stop > hi + 1e-9 * scale) {
        traj.leaves_band_after_stop = true;
        break;
      }
    }
  }
  return traj;
}

double det_boundary(double t_hat, double gain_at_stop, const MarketParams& mp,
                    const TimeGrid& tg, Side side) {
  if (t_hat >= 2.0 * tg.T)
    throw std::invalid_argument("det_boundary: t_hat must be < 2T");
  return mp.q_bar + (gain_at_stop + side_spread_sign(side) * mp.half_spread) /
                        (mp.risk_aversion * mp.nu * (2.0 * tg.T - t_hat));
}

namespace {

double gain_rate(const DetTrajectory& traj, double s) {
  // d/ds of the remaining deterministic gain equals minus the signal
  return -traj.signal_start * std::exp(-traj.kappa * (s - traj.start_time));
}

template <typename Fn>
double max_residual_on_path(const DetTrajectory& traj, int n_points, double h,
                            Fn&& residual_at) {
  const double lo = traj.start_time + 2.5 * h;
  const double hi = traj.stop_time - 2.5 * h;
  if (hi <= lo || n_points < 1) return 0.0;
  double worst = 0.0;
  for (int i = 0; i < n_points; ++i) {
    const double s = lo + (hi - lo) * i / std::max(1, n_points - 1);
    worst = std::max(worst, std::abs(residual_at(s)));
  }
  return worst;
}

}  // namespace

double det_euler_lagrange_residual(const DetTrajectory& traj, int n_points,
                                   double h) {
  return max_residual_on_path(traj, n_points, h, [&](double s) {
    const double qdd =
        (-traj.position_at(s - 2 * h) + 16.0 * traj.position_at(s - h) -
         30.0 * traj.position_at(s) + 16.0 * traj.position_at(s + h) -
         traj.position_at(s + 2 * h)) /
        (12.0 * h * h);
    return -2.0 * traj.impact * qdd + gain_rate(traj, s) +
           traj.lam_nu * (traj.position_at(s) - traj.q_bar);
  });
}

double det_euler_lagrange_residual_power(const DetTrajectory& traj, double p,
                                         int n_points, double h) {
  if (!(p > 1.0))
    throw std::invalid_argument("residual_power: exponent must be > 1");
  auto signed_pow = [&](double v) {
    return v >= 0.0 ? std::pow(v, p - 1.0) : -std::pow(-v, p - 1.0);
  };
  return max_residual_on_path(traj, n_points, h, [&](double s) {
    const double dw = (signed_pow(traj.velocity_at(s - 2 * h)) -
                       8.0 * signed_pow(traj.velocity_at(s - h)) +
                       8.0 * signed_pow(traj.velocity_at(s + h)) -
                       signed_pow(traj.velocity_at(s + 2 * h))) /
                      (12.0 * h);
    return -p * traj.impact * dw + gain_rate(traj, s) +
           traj.lam_nu * (traj.position_at(s) - traj.q_bar);
  });
}

std::pair<double, double> det_stopping_residual(const DetTrajectory& traj) {
  return {std::abs(traj.velocity_at(traj.stop_time)),
          std::abs(traj.position_at(traj.stop_time) -
                   traj.boundary_at(traj.stop_time))};
}

DetTrajectory with_integration_constant_shift(const DetTrajectory& traj,
                                              double da) {
  const double factor = traj.decay_rate * traj.stop_time;
  if (factor > 700.0)
    throw std::invalid_argument(
        "integration-constant shift overflows for this decay rate");
  DetTrajectory out = traj;
  out.coeff_grow_scaled += da * std::exp(factor);
  out.integration_constant += da;
  return out;
}

DetTrajectory with_particular_scaled(const DetTrajectory& traj, double rel) {
  DetTrajectory out = traj;
  out.particular *= (1.0 + rel);
  return out;
}

QuadCostValue::QuadCostValue(const MarketParams& mp, const OuParams& ou,
                             const TimeGrid& tg)
    : mp_(mp), ou_(ou), T_(tg.T), horizon_(2.0 * tg.T) {
  mp.validate();
  ou.validate();
  if (mp.half_spread != 0.0)
    throw std::invalid_argument("quadcost_value: requires zero half-spread");
  if (!(mp.impact > 0.0))
    throw std::invalid_argument("quadcost_value: requires K > 0");
  A_ = std::sqrt(mp.risk_aversion * mp.nu / (2.0 * mp.impact));
}

double QuadCostValue::v2(double t) const {
  const double c = T_ * A_;
  const double th = std::tanh((T_ - t) * A_);
  return mp_.impact * A_ * (th + c) / (1.0 + c * th);
}

double QuadCostValue::discount(double t, double s) const {
  // log(cosh(wA) + TA sinh(wA)) evaluated overflow-free
  const double c = T_ * A_;
  auto log_mode = [&](double w) {
    return w * A_ +
           std::log(0.5 * (1.0 + c) + 0.5 * (1.0 - c) * std::exp(-2.0 * w * A_));
  };
  return std::exp(log_mode(T_ - s) - log_mode(T_ - t));
}

double QuadCostValue::gain_slope(double s) const {
  const double rem = horizon_ - s;
  if (ou_.kappa * rem < 1e-12) return rem;
  return -std::expm1(-ou_.kappa * rem) / ou_.kappa;
}

double QuadCostValue::gain_const(double s) const {
  return ou_.xbar * ((horizon_ - s) - gain_slope(s));
}

double QuadCostValue::v1_slope(double s) const {
  if (s >= T_) return 0.0;
  return integrate_adaptive(
             [&](double r) {
               return discount(s, r) * v2(r) * gain_slope(r) *
                      std::exp(-ou_.kappa * (r - s));
             },
             s, T_) /
         mp_.impact;
}

double QuadCostValue::v1_const(double s) const {
  if (s >= T_) return 0.0;
  return integrate_adaptive(
             [&](double r) {
               const double mean_level =
                   gain_const(r) + gain_slope(r) * ou_.xbar *
                                       (-std::expm1(-ou_.kappa * (r - s)));
               return discount(s, r) * v2(r) * mean_level;
             },
             s, T_) /
         mp_.impact;
}

double QuadCostValue::v1(double t, double x) const {
  return v1_const(t) + v1_slope(t) * x;
}

double QuadCostValue::v0(double t, double x) const {
  if (t >= T_) return 0.0;
  return -integrate_adaptive(
             [&](double s) {
               const double a = gain_const(s) - v1_const(s);
               const double b = gain_slope(s) - v1_slope(s);
               const auto m = signals::ou_conditional_moments(ou_, x, t, s);
               const double centered = a + b * m.mean;
               return centered * centered + b * b * m.variance;
             },
             t, T_, 1e-8, 1e-14) /
         (4.0 * mp_.impact);
}

double QuadCostValue::value(double t, double x, double q) const {
  const double dq = q - mp_.q_bar;
  return v0(t, x) + v1(t, x) * dq + v2(t) * dq * dq;
}

QuadCostValue quadcost_value(const MarketParams& mp, const OuParams& ou,
                             const TimeGrid& tg) {
  return QuadCostValue(mp, ou, tg);
}

double quadcost_rate(double t, double q, double x, const QuadCostValue& qcv) {
  const MarketParams& mp = qcv.market();
  const double g =
      signals::integrated_gain(qcv.signal(), x, t, qcv.horizon());
  return (g - qcv.v1(t, x) - 2.0 * qcv.v2(t) * (q - mp.q_bar)) /
         (2.0 * mp.impact);
}

double expansion_dv1_dq(double t, double q, double x, const MarketParams& mp,
                        const OuParams& ou, const TimeGrid& tg) {
  mp.validate();
  const double lam_nu = mp.risk_aversion * mp.nu;
  const double horizon = 2.0 * tg.T;
  const double spread = mp.half_spread;
  auto integrand = [&](double s) {
    const auto gm = signals::gain_moments(ou, x, t, s, horizon);
    const double sigma = std::sqrt(std::max(gm.variance, 0.0));
    const double slope = lam_nu * (horizon - s);
    const double p_slope = slope * (q - mp.q_bar);
    if (sigma <=
        1e-13 * (1.0 + std::abs(gm.mean) + std::abs(p_slope) + spread)) {
      // analytic limit of the bracket as the gain variance vanishes
      return slope * (std::max(gm.mean - p_slope - spread, 0.0) -
                      std::max(p_slope - spread - gm.mean, 0.0));
    }
    const double lam_plus = (spread + p_slope - gm.mean) / sigma;
    const double lam_minus = (-spread + p_slope - gm.mean) / sigma;
    const double bracket = normal_pdf(lam_plus) - normal_pdf(lam_minus) -
                           lam_plus * (1.0 - normal_cdf(lam_plus)) -
                           lam_minus * normal_cdf(lam_minus);
    return slope * sigma * bracket;
  };
  return 0.5 * integrate_adaptive(integrand, t, tg.T, 1e-8, 1e-14);
}

std::pair<double, double> expansion_boundary(double t, double x,
                                             const MarketParams& mp,
                                             const OuParams& ou,
                                             const TimeGrid& tg, int order) {
  const double g = signals::integrated_gain(ou, x, t, 2.0 * tg.T);
  const auto b0 = policy::nt_boundaries(t, g, mp, tg);
  if (order == 0) return b0;
  if (order != 1)
    throw std::invalid_argument("expansion_boundary: order must be 0 or 1");
  if (!(mp.impact > 0.0))
    throw std::invalid_argument("expansion_boundary: order 1 requires K > 0");
  const double curvature = mp.risk_aversion * mp.nu * (2.0 * tg.T - t);
  const double b1_buy =
      -expansion_dv1_dq(t, b0.first, x, mp, ou, tg) / curvature;
  const double b1_sell =
      -expansion_dv1_dq(t, b0.second, x, mp, ou, tg) / curvature;
  return {b0.first + b1_buy / mp.impact, b0.second + b1_sell / mp.impact};
}

ExpansionTerms expansion_terms(double t, double q, double x,
                               const MarketParams& mp, const OuParams& ou,
                               const TimeGrid& tg) {
  ExpansionTerms terms;
  terms.v0 = policy::value_approx(t, q, mp, tg);
  terms.dv1_dq = expansion_dv1_dq(t, q, x, mp, ou, tg);
  terms.b0 = expansion_boundary(t, x, mp, ou, tg, 0);
  const auto b_corrected = expansion_boundary(t, x, mp, ou, tg, 1);
  terms.b1 = {(b_corrected.first - terms.b0.first) * mp.impact,
              (b_corrected.second - terms.b0.second) * mp.impact};
  return terms;
}

}  // namespace axe::exact
