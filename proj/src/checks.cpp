#include "axe/checks.hpp"

#include <cmath>

#include "axe/exact.hpp"
#include "axe/oracle.hpp"

namespace axe::checks {

namespace {

using exact::QuadCostValue;
using policy::MarketParams;
using signals::OuParams;
using signals::TimeGrid;

double riccati_residual(const QuadCostValue& qcv, const MarketParams& mp,
                        int n_points, double t_hi) {
  const double h = 1e-4;
  double worst = 0.0;
  for (int i = 0; i < n_points; ++i) {
    const double t = h + (t_hi - 2.0 * h) * i / std::max(1, n_points - 1);
    const double dv2 = (qcv.v2(t + h) - qcv.v2(t - h)) / (2.0 * h);
    const double v2 = qcv.v2(t);
    const double res =
        dv2 + 0.5 * mp.risk_aversion * mp.nu - v2 * v2 / mp.impact;
    worst = std::max(worst, std::abs(res));
  }
  return worst;
}

// finite-difference residual of the full quadratic-cost HJB on a coarse
// (t, x, q) grid; x- and q-dependence of the ansatz is polynomial, so the
// truncation error lives in the time direction only
double quadcost_hjb_residual(const QuadCostValue& qcv, const MarketParams& mp,
                             const OuParams& ou, const TimeGrid& tg, int nt,
                             int nx, int nq) {
  const double t_lo = 0.5 * tg.T;
  const double t_hi = tg.T - 0.01 * tg.T;
  const double sd = std::sqrt(ou.stationary_variance());
  const double x_lo = ou.xbar - 3.0 * sd, x_hi = ou.xbar + 3.0 * sd;
  const double q_lo = mp.q_bar - 1.0, q_hi = mp.q_bar + 1.0;
  const double ht = (t_hi - t_lo) / (nt - 1);
  const double hx = (x_hi - x_lo) / (nx - 1);
  const double hq = (q_hi - q_lo) / (nq - 1);

  // v0, v1 depend on (t, x) only; evaluate once per node
  std::vector<double> v0(nt * nx), v1(nt * nx), v2(nt);
  for (int it = 0; it < nt; ++it) {
    const double t = t_lo + it * ht;
    v2[it] = qcv.v2(t);
    for (int ix = 0; ix < nx; ++ix) {
      const double x = x_lo + ix * hx;
      v0[it * nx + ix] = qcv.v0(t, x);
      v1[it * nx + ix] = qcv.v1(t, x);
    }
  }
  auto value = [&](int it, int ix, double dq) {
    return v0[it * nx + ix] + v1[it * nx + ix] * dq + v2[it] * dq * dq;
  };

  double worst = 0.0;
  for (int it = 1; it + 1 < nt; ++it) {
    const double t = t_lo + it * ht;
    for (int ix = 1; ix + 1 < nx; ++ix) {
      const double x = x_lo + ix * hx;
      const double g = signals::integrated_gain(ou, x, t, qcv.horizon());
      const double mu = ou.kappa * (ou.xbar - x);
      for (int iq = 1; iq + 1 < nq; ++iq) {
        const double dq = q_lo + iq * hq - mp.q_bar;
        const double vt =
            (value(it + 1, ix, dq) - value(it - 1, ix, dq)) / (2.0 * ht);
        const double vx =
            (value(it, ix + 1, dq) - value(it, ix - 1, dq)) / (2.0 * hx);
        const double vxx = (value(it, ix + 1, dq) - 2.0 * value(it, ix, dq) +
                            value(it, ix - 1, dq)) /
                           (hx * hx);
        const double vq = (value(it, ix, dq + hq) - value(it, ix, dq - hq)) /
                          (2.0 * hq);
        const double gap = g - vq;
        const double res = vt + mu * vx + 0.5 * ou.eta * vxx +
                           0.5 * mp.risk_aversion * mp.nu * dq * dq -
                           gap * gap / (4.0 * mp.impact);
        worst = std::max(worst, std::abs(res));
      }
    }
  }
  return worst;
}

}  // namespace

std::vector<CheckResult> run_exact_checks(const config::ExactCheckSpec& spec,
                                          const TimeGrid& tg) {
  std::vector<CheckResult> out;

  {  // gain PDE consistency of the closed-form integrated gain
    const OuParams ou{spec.kappa, 0.0, spec.eta};
    const Eigen::ArrayXd ts = Eigen::ArrayXd::LinSpaced(9, 0.1 * tg.T, 0.9 * tg.T);
    const double sd = std::sqrt(ou.stationary_variance());
    const Eigen::ArrayXd xs = Eigen::ArrayXd::LinSpaced(9, -3.0 * sd, 3.0 * sd);
    const double res = signals::gain_pde_residual(ou, 2.0 * tg.T, ts, xs);
    out.push_back({"gain_pde", res, spec.tol.gain_pde, res < spec.tol.gain_pde});
  }

  const MarketParams mp_quad =
      MarketParams::make(spec.nu, 0.0, spec.impact, spec.lambda, 0.0);
  const OuParams ou_quad{spec.kappa, 0.0, spec.eta};
  const QuadCostValue qcv(mp_quad, ou_quad, tg);

  {
    const double res = riccati_residual(qcv, mp_quad, spec.riccati_points, tg.T);
    out.push_back({"riccati_v2", res, spec.tol.riccati, res < spec.tol.riccati});
  }
  {
    const double res = quadcost_hjb_residual(qcv, mp_quad, ou_quad, tg,
                                             spec.grid_t, spec.grid_x,
                                             spec.grid_q);
    out.push_back({"quadcost_hjb", res, spec.tol.quadcost_hjb,
                   res < spec.tol.quadcost_hjb});
  }
  {
    const MarketParams mp_det = MarketParams::make(
        spec.det_nu, spec.det_half_spread, spec.det_impact, spec.det_lambda,
        spec.det_q_bar * spec.det_lambda * spec.det_nu);
    const OuParams ou_det{1440.0 / spec.det_reversion_minutes, 0.0, 0.0};
    const auto traj = exact::det_trajectory_solve(spec.det_q0, spec.det_x0,
                                                  tg.t_open, mp_det, tg, ou_det);
    const double res = exact::det_euler_lagrange_residual(traj, 300);
    out.push_back({"euler_lagrange", res, spec.tol.euler_lagrange,
                   res < spec.tol.euler_lagrange});
    const auto [v_res, b_res] = exact::det_stopping_residual(traj);
    const double stop_res = std::max(v_res, b_res);
    out.push_back(
        {"det_stopping", stop_res, spec.tol.stopping, stop_res < spec.tol.stopping});
  }
  return out;
}

std::vector<DetCompareResult> run_det_compare(
    const config::DetCompareSpec& spec, const TimeGrid& tg) {
  const OuParams ou{1440.0 / spec.reversion_minutes, 0.0, 0.0};
  std::vector<DetCompareResult> out;
  for (double impact : spec.impact_sweep) {
    const MarketParams mp =
        MarketParams::make(spec.nu, spec.half_spread, impact, spec.lambda,
                           spec.q_bar * spec.lambda * spec.nu);
    const auto traj = exact::det_trajectory_solve(spec.q0, spec.x0, tg.t_open,
                                                  mp, tg, ou);
    const auto prob = oracle::DiscreteProblem::for_det_signal(
        spec.q0, spec.x0, tg.t_open, tg.T, tg.n_steps, mp, ou, 2.0 * tg.T);
    const auto sol = oracle::solve_discrete_deterministic(prob);
    DetCompareResult r;
    r.impact = impact;
    r.stop_time = traj.stop_time;
    r.stops_after_close = traj.stops_after_close;
    for (int i = 0; i <= tg.n_steps; ++i) {
      const double s = tg.t_open + i * (tg.T - tg.t_open) / tg.n_steps;
      r.sup_error = std::max(
          r.sup_error, std::abs(sol.positions[i] - traj.position_at(s)));
    }
    out.push_back(r);
  }
  return out;
}

std::vector<ExpansionCompareResult> run_expansion_compare(
    const config::ExpansionCompareSpec& spec, const TimeGrid& tg) {
  const OuParams ou{spec.kappa, 0.0,
                    2.0 * spec.kappa * spec.signal_sd * spec.signal_sd};
  std::vector<ExpansionCompareResult> out;
  for (double impact : spec.impact_sweep) {
    const MarketParams mp =
        MarketParams::make(spec.nu, spec.half_spread, impact, spec.lambda,
                           spec.q_bar * spec.lambda * spec.nu);
    oracle::HjbGridSpec gs;
    gs.nx = spec.nx;
    gs.nq = spec.nq;
    gs.x_halfwidth_sds = spec.x_halfwidth_sds;
    gs.nt = spec.nt > 0
                ? spec.nt
                : static_cast<int>(
                      std::ceil(1.05 * oracle::hjb_min_stable_steps(mp, ou, tg, gs)));
    const auto grid = oracle::solve_hjb_grid(mp, ou, tg, gs);

    const double span = tg.T - tg.t_open;
    const double t_lo = tg.t_open + spec.t_window_lo_frac * span;
    const double t_hi = tg.t_open + spec.t_window_hi_frac * span;
    const double x_win = spec.x_window_sds * spec.signal_sd;

    auto order_fn = [&](int order) {
      return [&, order](double t, double x) {
        return exact::expansion_boundary(t, x, mp, ou, tg, order);
      };
    };
    const auto cmp0 =
        oracle::compare_boundaries(grid, order_fn(0), t_lo, t_hi, -x_win, x_win);
    const auto cmp1 =
        oracle::compare_boundaries(grid, order_fn(1), t_lo, t_hi, -x_win, x_win);
    ExpansionCompareResult r;
    r.impact = impact;
    r.err_order0 = std::max(cmp0.sup_buy, cmp0.sup_sell);
    r.err_order1 = std::max(cmp1.sup_buy, cmp1.sup_sell);
    out.push_back(r);
  }
  return out;
}

}  // namespace axe::checks
