#include "axe/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "axe/exact.hpp"

namespace axe::oracle {

void DiscreteProblem::validate() const {
  mp.validate();
  if (n < 1) throw std::invalid_argument("DiscreteProblem: n must be >= 1");
  if (!(dt > 0.0)) throw std::invalid_argument("DiscreteProblem: dt must be > 0");
  if (gains.size() != n)
    throw std::invalid_argument("DiscreteProblem: gains must have n entries");
  if (horizon < t0 + n * dt)
    throw std::invalid_argument("DiscreteProblem: horizon before last step");
  if (!(mp.impact > 0.0) && !(mp.half_spread > 0.0))
    throw std::invalid_argument("DiscreteProblem: need K > 0 or C > 0");
}

DiscreteProblem DiscreteProblem::for_det_signal(double q0, double x0,
                                                double t0, double t_end,
                                                int n, const MarketParams& mp,
                                                const OuParams& ou,
                                                double horizon) {
  if (ou.eta != 0.0 || ou.xbar != 0.0 || !(ou.kappa > 0.0))
    throw std::invalid_argument(
        "for_det_signal: signal must be noiseless, zero-mean, kappa > 0");
  DiscreteProblem prob;
  prob.t0 = t0;
  prob.n = n;
  prob.dt = (t_end - t0) / n;
  prob.q0 = q0;
  prob.horizon = horizon;
  prob.mp = mp;
  prob.gains.resize(n);
  const double k = ou.kappa;
  const double tail = std::exp(-k * (horizon - t0));
  for (int i = 0; i < n; ++i) {
    const double s_lo = i * prob.dt;
    const double s_hi = (i + 1) * prob.dt;
    // exact average of (x0/k)(e^{-k s} - e^{-k(2T-t0)}) over the step
    prob.gains[i] = x0 / k *
                    ((std::exp(-k * s_lo) - std::exp(-k * s_hi)) /
                         (k * prob.dt) -
                     tail);
  }
  prob.validate();
  return prob;
}

namespace {

struct SmoothParts {
  double value = 0.0;
  Eigen::ArrayXd grad;
};

// objective and gradient of everything except the C|dq| term
SmoothParts smooth_objective(const DiscreteProblem& prob,
                             const Eigen::ArrayXd& trades,
                             bool want_grad) {
  const int n = prob.n;
  const double lam_nu = prob.mp.risk_aversion * prob.mp.nu;
  const double k_imp = prob.mp.impact;
  const double tail_weight =
      lam_nu * (prob.horizon - (prob.t0 + n * prob.dt));
  Eigen::ArrayXd r(n + 1);  // positions relative to the target
  r[0] = prob.q0 - prob.mp.q_bar;
  for (int i = 0; i < n; ++i) r[i + 1] = r[i] + trades[i];

  SmoothParts out;
  for (int i = 0; i < n; ++i) {
    const double d = trades[i];
    out.value += k_imp * d * d / prob.dt - prob.gains[i] * d +
                 0.5 * lam_nu * prob.dt * (r[i] * r[i] + r[i] * d + d * d / 3.0);
  }
  out.value += 0.5 * tail_weight * r[n] * r[n];

  if (want_grad) {
    out.grad.resize(n);
    // suffix[i] = sum_{j >= i} (r[j] + r[j+1]) over later segments
    double suffix = 0.0;
    const double terminal = tail_weight * r[n];
    for (int j = n - 1; j >= 0; --j) {
      out.grad[j] = 2.0 * k_imp * trades[j] / prob.dt - prob.gains[j] +
                    0.5 * lam_nu * prob.dt *
                        (suffix + r[j] + 2.0 * trades[j] / 3.0) +
                    terminal;
      suffix += r[j] + r[j + 1];
    }
  }
  return out;
}

Eigen::ArrayXd soft_threshold(const Eigen::ArrayXd& z, double level) {
  return z.sign() * (z.abs() - level).max(0.0);
}

}  // namespace

double discrete_objective(const DiscreteProblem& prob,
                          const Eigen::ArrayXd& trades) {
  return smooth_objective(prob, trades, false).value +
         prob.mp.half_spread * trades.abs().sum();
}

DiscreteSolution solve_discrete_deterministic(const DiscreteProblem& prob,
                                              double obj_tol, int max_iter) {
  prob.validate();
  const int n = prob.n;
  const double spread = prob.mp.half_spread;

  // Lipschitz constant of the smooth gradient by power iteration on the
  // (constant) Hessian, applied through gradient differences.
  const Eigen::ArrayXd grad0 = smooth_objective(prob, Eigen::ArrayXd::Zero(n), true).grad;
  Eigen::ArrayXd v = Eigen::ArrayXd::Ones(n) / std::sqrt(double(n));
  double lip = 1.0;
  for (int it = 0; it < 30; ++it) {
    Eigen::ArrayXd hv = smooth_objective(prob, v, true).grad - grad0;
    const double norm = std::sqrt(hv.square().sum());
    if (norm <= 0.0) break;
    lip = norm;
    v = hv / norm;
  }
  lip *= 1.1;
  const double mu = 2.0 * prob.mp.impact / prob.dt;  // strong convexity floor

  Eigen::ArrayXd x = Eigen::ArrayXd::Zero(n);
  Eigen::ArrayXd y = x;
  double fx = discrete_objective(prob, x);
  double momentum = 1.0;

  DiscreteSolution sol;
  sol.objective_trace.reserve(1024);

  for (int iter = 1; iter <= max_iter; ++iter) {
    const Eigen::ArrayXd grad_y = smooth_objective(prob, y, true).grad;
    const Eigen::ArrayXd z = soft_threshold(y - grad_y / lip, spread / lip);
    const double fz = discrete_objective(prob, z);

    Eigen::ArrayXd x_next;
    double fx_next;
    if (fz <= fx) {  // monotone acceptance
      x_next = z;
      fx_next = fz;
    } else {
      x_next = x;
      fx_next = fx;
    }
    const double momentum_next =
        0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    y = x_next + (momentum / momentum_next) * (z - x_next) +
        ((momentum - 1.0) / momentum_next) * (x_next - x);
    x = x_next;
    fx = fx_next;
    momentum = momentum_next;
    sol.objective_trace.push_back(fx);

    if (iter % 8 == 0 || iter == max_iter) {
      // gradient-mapping certificate at x
      const Eigen::ArrayXd grad_x = smooth_objective(prob, x, true).grad;
      const Eigen::ArrayXd px = soft_threshold(x - grad_x / lip, spread / lip);
      const double gap_sq = (lip * (x - px)).square().sum();
      const double tol_eff = obj_tol * std::max(1.0, std::abs(fx));
      const bool certified = mu > 0.0 && gap_sq / (2.0 * mu) <= tol_eff;
      const bool plateau =
          mu <= 0.0 && std::sqrt(gap_sq) <= 1e-9 * std::max(1.0, lip);
      if (certified || plateau) {
        sol.iterations = iter;
        break;
      }
      if (iter == max_iter)
        throw NoConvergenceError(
            "solve_discrete_deterministic: iteration cap reached");
    }
  }

  sol.trades = x;
  sol.positions.resize(n + 1);
  sol.positions[0] = prob.q0;
  for (int i = 0; i < n; ++i) sol.positions[i + 1] = sol.positions[i] + x[i];
  sol.objective = fx;
  if (sol.iterations == 0) sol.iterations = max_iter;
  return sol;
}

int hjb_min_stable_steps(const MarketParams& mp, const OuParams& ou,
                         const TimeGrid& tg, const HjbGridSpec& spec) {
  const double sd = std::sqrt(ou.stationary_variance());
  const double dx = 2.0 * spec.x_halfwidth_sds * sd / (spec.nx - 1);
  const double x_max = std::abs(ou.xbar) + spec.x_halfwidth_sds * sd;
  const double span = tg.T - tg.t_open;

  double q_lo = spec.q_lo, q_hi = spec.q_hi;
  const double g_max =
      std::abs(signals::integrated_gain(ou, x_max, tg.t_open, 2.0 * tg.T)) +
      std::abs(ou.xbar) * 2.0 * tg.T;
  const double lam_nu = mp.risk_aversion * mp.nu;
  if (spec.auto_q_range) {
    const double half =
        std::max(5.0 * mp.half_spread, 2.5 * (g_max + mp.half_spread)) /
        (lam_nu * tg.T);
    q_lo = mp.q_bar - half;
    q_hi = mp.q_bar + half;
  }
  const double dq = (q_hi - q_lo) / (spec.nq - 1);

  double dt_bound = std::numeric_limits<double>::infinity();
  if (ou.eta > 0.0) dt_bound = std::min(dt_bound, 0.5 * dx * dx / ou.eta);
  const double drift_max = ou.kappa * (spec.x_halfwidth_sds * sd) + 1e-300;
  dt_bound = std::min(dt_bound, dx / drift_max);
  const double vq_max =
      lam_nu * 2.0 * tg.T *
      std::max(std::abs(q_lo - mp.q_bar), std::abs(q_hi - mp.q_bar));
  const double u_max =
      (g_max + mp.half_spread + vq_max) / (2.0 * mp.impact) + 1e-300;
  dt_bound = std::min(dt_bound, dq / u_max);

  return static_cast<int>(std::ceil(span / (spec.cfl_safety * dt_bound)));
}

GridValue solve_hjb_grid(const MarketParams& mp, const OuParams& ou,
                         const TimeGrid& tg, const HjbGridSpec& spec) {
  mp.validate();
  ou.validate();
  if (!(mp.impact > 0.0))
    throw std::invalid_argument("solve_hjb_grid: K must be > 0");
  if (!(ou.kappa > 0.0))
    throw std::invalid_argument("solve_hjb_grid: kappa must be > 0");
  if (spec.nx < 5 || spec.nq < 5 || spec.nt < 1)
    throw std::invalid_argument("solve_hjb_grid: grid too small");

  const int min_steps = hjb_min_stable_steps(mp, ou, tg, spec);
  if (spec.nt < min_steps)
    throw CflViolationError("solve_hjb_grid: time step violates CFL bound (need >= " +
                            std::to_string(min_steps) + " steps)");

  const double lam_nu = mp.risk_aversion * mp.nu;
  const double sd = std::sqrt(ou.stationary_variance());
  const double two_t = 2.0 * tg.T;

  GridValue gv;
  gv.x_grid = Eigen::ArrayXd::LinSpaced(spec.nx, ou.xbar - spec.x_halfwidth_sds * sd,
                                        ou.xbar + spec.x_halfwidth_sds * sd);
  double q_lo = spec.q_lo, q_hi = spec.q_hi;
  if (spec.auto_q_range) {
    const double x_max = std::abs(ou.xbar) + spec.x_halfwidth_sds * sd;
    const double g_max =
        std::abs(signals::integrated_gain(ou, x_max, tg.t_open, two_t)) +
        std::abs(ou.xbar) * two_t;
    const double half =
        std::max(5.0 * mp.half_spread, 2.5 * (g_max + mp.half_spread)) /
        (lam_nu * tg.T);
    q_lo = mp.q_bar - half;
    q_hi = mp.q_bar + half;
  }
  gv.q_grid = Eigen::ArrayXd::LinSpaced(spec.nq, q_lo, q_hi);

  const double dx = (gv.x_grid[spec.nx - 1] - gv.x_grid[0]) / (spec.nx - 1);
  const double dq = (q_hi - q_lo) / (spec.nq - 1);
  const double dtg = (tg.T - tg.t_open) / spec.nt;

  const int stride =
      std::max(1, (spec.nt + spec.max_stored_slices - 1) /
                      std::max(1, spec.max_stored_slices - 1));
  std::vector<double> slice_times;
  std::vector<Eigen::MatrixXd> slice_values;
  std::vector<Eigen::ArrayXd> slice_bbuy, slice_bsell;

  Eigen::MatrixXd v(spec.nx, spec.nq);
  for (int i = 0; i < spec.nx; ++i)
    for (int j = 0; j < spec.nq; ++j) {
      const double dqb = gv.q_grid[j] - mp.q_bar;
      v(i, j) = 0.5 * lam_nu * tg.T * dqb * dqb;
    }

  Eigen::MatrixXd vq(spec.nx, spec.nq);
  auto fill_vq = [&](const Eigen::MatrixXd& m) {
    for (int i = 0; i < spec.nx; ++i) {
      vq(i, 0) = (-3.0 * m(i, 0) + 4.0 * m(i, 1) - m(i, 2)) / (2.0 * dq);
      for (int j = 1; j < spec.nq - 1; ++j)
        vq(i, j) = (m(i, j + 1) - m(i, j - 1)) / (2.0 * dq);
      vq(i, spec.nq - 1) = (3.0 * m(i, spec.nq - 1) - 4.0 * m(i, spec.nq - 2) +
                            m(i, spec.nq - 3)) /
                           (2.0 * dq);
    }
  };

  auto store_slice = [&](const Eigen::MatrixXd& m, double t) {
    fill_vq(m);
    Eigen::ArrayXd bbuy = Eigen::ArrayXd::Constant(
        spec.nx, std::numeric_limits<double>::quiet_NaN());
    Eigen::ArrayXd bsell = bbuy;
    for (int i = 0; i < spec.nx; ++i) {
      const double g = signals::integrated_gain(ou, gv.x_grid[i], t, two_t);
      // buy edge: zero of g - C - Vq (decreasing in q)
      for (int j = 0; j + 1 < spec.nq; ++j) {
        const double w0 = g - mp.half_spread - vq(i, j);
        const double w1 = g - mp.half_spread - vq(i, j + 1);
        if (w0 >= 0.0 && w1 < 0.0) {
          bbuy[i] = gv.q_grid[j] + dq * w0 / (w0 - w1);
          break;
        }
      }
      // sell edge: zero of Vq - g - C (increasing in q)
      for (int j = 0; j + 1 < spec.nq; ++j) {
        const double w0 = vq(i, j) - g - mp.half_spread;
        const double w1 = vq(i, j + 1) - g - mp.half_spread;
        if (w0 < 0.0 && w1 >= 0.0) {
          bsell[i] = gv.q_grid[j] + dq * (0.0 - w0) / (w1 - w0);
          break;
        }
      }
    }
    slice_times.push_back(t);
    slice_values.push_back(m);
    slice_bbuy.push_back(std::move(bbuy));
    slice_bsell.push_back(std::move(bsell));
  };

  store_slice(v, tg.T);

  Eigen::MatrixXd v_next(spec.nx, spec.nq);
  for (int step = 1; step <= spec.nt; ++step) {
    const double t_src = tg.T - (step - 1) * dtg;
    const double t_new = tg.T - step * dtg;
    fill_vq(v);
    for (int i = 0; i < spec.nx; ++i) {
      const double x = gv.x_grid[i];
      const double g = signals::integrated_gain(ou, x, t_src, two_t);
      const double mu = ou.kappa * (ou.xbar - x);
      for (int j = 0; j < spec.nq; ++j) {
        // upwinded drift; the OU drift points inward so the stencil stays
        // inside the domain
        double vx;
        if (mu >= 0.0)
          vx = (i + 1 < spec.nx ? (v(i + 1, j) - v(i, j)) / dx : 0.0);
        else
          vx = (i > 0 ? (v(i, j) - v(i - 1, j)) / dx : 0.0);
        double vxx;
        if (i == 0)
          vxx = (v(0, j) - 2.0 * v(1, j) + v(2, j)) / (dx * dx);
        else if (i == spec.nx - 1)
          vxx = (v(i, j) - 2.0 * v(i - 1, j) + v(i - 2, j)) / (dx * dx);
        else
          vxx = (v(i + 1, j) - 2.0 * v(i, j) + v(i - 1, j)) / (dx * dx);
        const double dqb = gv.q_grid[j] - mp.q_bar;
        const double u = policy::trade_rate_quadratic(g, vq(i, j), mp);
        v_next(i, j) = v(i, j) + dtg * (mu * vx + 0.5 * ou.eta * vxx +
                                        0.5 * lam_nu * dqb * dqb -
                                        mp.impact * u * u);
      }
    }
    v.swap(v_next);
    if (step % stride == 0 || step == spec.nt) store_slice(v, t_new);
  }

  // stored backward in time; flip to ascending
  const int n_stored = static_cast<int>(slice_times.size());
  gv.t_grid.resize(n_stored);
  gv.values.resize(n_stored);
  gv.boundary_buy.resize(n_stored, spec.nx);
  gv.boundary_sell.resize(n_stored, spec.nx);
  for (int r = 0; r < n_stored; ++r) {
    const int src = n_stored - 1 - r;
    gv.t_grid[r] = slice_times[src];
    gv.values[r] = std::move(slice_values[src]);
    gv.boundary_buy.row(r) = slice_bbuy[src].matrix().transpose();
    gv.boundary_sell.row(r) = slice_bsell[src].matrix().transpose();
  }
  return gv;
}

BoundaryCompare compare_boundaries(
    const GridValue& grid,
    const std::function<std::pair<double, double>(double, double)>& analytic,
    double t_lo, double t_hi, double x_lo, double x_hi) {
  BoundaryCompare rep;
  double sum_buy = 0.0, sum_sell = 0.0;
  for (int r = 0; r < grid.t_grid.size(); ++r) {
    const double t = grid.t_grid[r];
    if (t < t_lo || t > t_hi) continue;
    for (int i = 0; i < grid.x_grid.size(); ++i) {
      const double x = grid.x_grid[i];
      if (x < x_lo || x > x_hi) continue;
      const double gb = grid.boundary_buy(r, i);
      const double gs = grid.boundary_sell(r, i);
      if (!std::isfinite(gb) || !std::isfinite(gs)) continue;
      const auto [ab, as] = analytic(t, x);
      rep.sup_buy = std::max(rep.sup_buy, std::abs(gb - ab));
      rep.sup_sell = std::max(rep.sup_sell, std::abs(gs - as));
      sum_buy += gb - ab;
      sum_sell += gs - as;
      ++rep.n_compared;
    }
  }
  if (rep.n_compared > 0) {
    rep.mean_signed_buy = sum_buy / rep.n_compared;
    rep.mean_signed_sell = sum_sell / rep.n_compared;
  }
  return rep;
}

}  // namespace axe::oracle
