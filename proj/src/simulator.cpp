#include "axe/simulator.hpp"

#include <cmath>
#include <stdexcept>

#include "axe/math.hpp"

namespace axe::sim {

namespace {
constexpr std::uint64_t kStreamDaily = 0x6461696c79ULL;
constexpr std::uint64_t kStreamSlow = 0x736c6f77ULL;
constexpr std::uint64_t kStreamFast = 0x66617374ULL;
constexpr std::uint64_t kStreamPrice = 0x7072696365ULL;
}  // namespace

const char* strategy_name(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::DailyIdealNoCost: return "daily_ideal_no_cost";
    case StrategyKind::DailyIdealWithCost: return "daily_ideal_with_cost";
    case StrategyKind::HjbMarket: return "hjb_market";
    case StrategyKind::HjbMarketLimit: return "hjb_market_limit";
  }
  return "unknown";
}

SimConfig SimConfig::default_experiment(std::uint64_t seed) {
  SimConfig cfg;
  cfg.n_days = 1260;
  cfg.seed = seed;
  cfg.tg = TimeGrid::session(1.0, 390, 1.0 / 1440.0);
  cfg.mp = MarketParams::make(0.01, 0.01, 0.0, 37.4, 0.0);
  cfg.ou_slow = OuParams::from_reversion_time(30.0 / 1440.0);
  cfg.ou_fast = OuParams::from_reversion_time(1.0 / 1440.0);
  cfg.daily = DailySignalSpec{10.0, 2.1};
  cfg.beta = 1.0;
  cfg.beta_fast = 13.0;
  cfg.strategies = {StrategyKind::DailyIdealNoCost,
                    StrategyKind::DailyIdealWithCost, StrategyKind::HjbMarket,
                    StrategyKind::HjbMarketLimit};
  return cfg;
}

void SimConfig::validate() const {
  if (n_days < 1) throw std::invalid_argument("SimConfig: n_days must be >= 1");
  tg.validate();
  mp.validate();
  ou_slow.validate();
  ou_fast.validate();
  if (!(ou_slow.kappa > 0.0) || !(ou_fast.kappa > 0.0))
    throw std::invalid_argument("SimConfig: signal reversion must be > 0");
  if (!(daily.reversion_days > 0.0))
    throw std::invalid_argument("SimConfig: daily reversion must be > 0");
  if (daily.annual_sharpe < 0.0)
    throw std::invalid_argument("SimConfig: daily Sharpe must be >= 0");
}

double daily_alpha_scale(const SimConfig& cfg) {
  const double T = cfg.tg.T;
  const double gap = cfg.tg.t_open;
  const double sess = T - gap;
  const double s = cfg.daily.annual_sharpe;
  if (s == 0.0) return 0.0;
  const double rho = std::exp(-1.0 / cfg.daily.reversion_days);
  auto integral_var = [&](double kappa) {
    // stationary variance of the integral of a unit-variance z-score over T
    return 2.0 * (T / kappa + std::expm1(-kappa * T) / (kappa * kappa));
  };
  const double var_signal =
      cfg.mp.nu * (cfg.beta * cfg.beta * integral_var(cfg.ou_slow.kappa) +
                   cfg.beta_fast * cfg.beta_fast * integral_var(cfg.ou_fast.kappa));
  // Sharpe of the open-executed daily target, accounting for the overnight
  // part riding on yesterday's position:
  //   mean  ~ sigma^2 (rho gap + sess) / (lambda nu)
  //   var   ~ [sigma^4 G + sigma^2 (nu T + var_signal)] / (lambda nu)^2
  const double drift_fourth =
      gap * gap * (1.0 + rho * rho) + 4.0 * rho * gap * sess + 2.0 * sess * sess;
  const double denom =
      252.0 * (rho * gap + sess) * (rho * gap + sess) - s * s * drift_fourth;
  if (denom <= 0.0)
    throw std::invalid_argument("daily_alpha_scale: Sharpe target infeasible");
  return std::sqrt(s * s * (cfg.mp.nu * T + var_signal) / denom);
}

namespace {

// Joint draw of (integral of the z-score over the gap, end value) given the
// start value; exact for the unit-variance mean-reverting process.
struct GapDraw {
  double integral = 0.0;
  double end = 0.0;
};

GapDraw sample_gap(NormalSampler& rng, double start, double kappa,
                   double gap) {
  const double e1 = std::exp(-kappa * gap);
  const double one_m = -std::expm1(-kappa * gap);  // 1 - e^{-kappa gap}
  const double v_end = -std::expm1(-2.0 * kappa * gap);
  const double m_end = start * e1;
  const double m_int = start * one_m / kappa;
  const double v_int =
      2.0 / kappa *
      (gap - 2.0 * one_m / kappa + 0.5 * v_end / kappa);
  const double cov = one_m * one_m / kappa;
  GapDraw d;
  d.end = m_end + std::sqrt(v_end) * rng.normal();
  const double resid_var = std::max(v_int - cov * cov / v_end, 0.0);
  d.integral = m_int + cov / v_end * (d.end - m_end) +
               std::sqrt(resid_var) * rng.normal();
  return d;
}

}  // namespace

PathSet generate_paths(const SimConfig& cfg) {
  cfg.validate();
  const int nd = cfg.n_days;
  const int ns = cfg.tg.n_steps;
  const double dt = cfg.tg.dt;
  const double gap = cfg.tg.t_open;
  const double sqrt_nu = std::sqrt(cfg.mp.nu);

  NormalSampler rng_daily(cfg.seed ^ kStreamDaily);
  NormalSampler rng_slow(cfg.seed ^ kStreamSlow);
  NormalSampler rng_fast(cfg.seed ^ kStreamFast);
  NormalSampler rng_price(cfg.seed ^ kStreamPrice);

  PathSet p;
  p.n_days = nd;
  p.n_steps = ns;
  p.initial_close = cfg.initial_price;
  p.price.resize(nd, ns + 1);
  p.epsilon.resize(nd, ns + 1);
  p.epsilon_fast.resize(nd, ns + 1);
  p.alpha_daily.resize(nd);

  const double sigma_alpha = daily_alpha_scale(cfg);
  const double rho = std::exp(-1.0 / cfg.daily.reversion_days);
  double a = rng_daily.normal();
  p.alpha_daily[0] = sigma_alpha * a;
  for (int d = 1; d < nd; ++d) {
    a = rho * a + std::sqrt(1.0 - rho * rho) * rng_daily.normal();
    p.alpha_daily[d] = sigma_alpha * a;
  }

  double eps_close = rng_slow.normal();       // stationary state at day-0 close
  double fast_close = rng_fast.normal();
  double price_close = cfg.initial_price;

  for (int d = 0; d < nd; ++d) {
    const double alpha = p.alpha_daily[d];
    const GapDraw slow_gap = sample_gap(rng_slow, eps_close, cfg.ou_slow.kappa, gap);
    const GapDraw fast_gap = sample_gap(rng_fast, fast_close, cfg.ou_fast.kappa, gap);
    p.epsilon(d, 0) = slow_gap.end;
    p.epsilon_fast(d, 0) = fast_gap.end;
    p.price(d, 0) = price_close + alpha * gap +
                    sqrt_nu * (cfg.beta * slow_gap.integral +
                               cfg.beta_fast * fast_gap.integral) +
                    std::sqrt(cfg.mp.nu * gap) * rng_price.normal();

    for (int k = 0; k < ns; ++k) {
      const double drift =
          alpha + sqrt_nu * (cfg.beta * p.epsilon(d, k) +
                             cfg.beta_fast * p.epsilon_fast(d, k));
      p.price(d, k + 1) = p.price(d, k) + drift * dt +
                          std::sqrt(cfg.mp.nu * dt) * rng_price.normal();
      p.epsilon(d, k + 1) =
          signals::ou_step(cfg.ou_slow, p.epsilon(d, k), dt, rng_slow.normal());
      p.epsilon_fast(d, k + 1) = signals::ou_step(
          cfg.ou_fast, p.epsilon_fast(d, k), dt, rng_fast.normal());
    }
    eps_close = p.epsilon(d, ns);
    fast_close = p.epsilon_fast(d, ns);
    price_close = p.price(d, ns);
  }
  return p;
}

namespace {

// Marked-to-mid book: executions hit cash at mid, spread costs/rebates are
// accumulated per day so net = gross - costs holds exactly.
class Book {
 public:
  explicit Book(int n_days)
      : gross_(n_days), linear_(n_days), impact_(n_days), net_(n_days),
        cum_(n_days), end_q_(n_days) {}

  void market_trade(double dq, double mid) {
    cash_ -= dq * mid;
    q_ += dq;
    day_market_volume_ += std::abs(dq);
  }

  void limit_fill(double dq, double mid) {
    cash_ -= dq * mid;
    q_ += dq;
    day_limit_volume_ += std::abs(dq);
  }

  double position() const { return q_; }

  void close_day(int d, double close_price, double cost_rate) {
    // gross marks the mid-price book; costs subtract afterwards so the
    // net = gross - linear - impact identity holds bitwise
    const double cost =
        cost_rate * day_market_volume_ - cost_rate * day_limit_volume_;
    const double equity_mid = cash_ + q_ * close_price;
    gross_[d] = equity_mid - prev_equity_mid_;
    linear_[d] = cost;
    impact_[d] = 0.0;
    net_[d] = gross_[d] - linear_[d] - impact_[d];
    cum_[d] = (d == 0 ? 0.0 : cum_[d - 1]) + net_[d];
    end_q_[d] = q_;
    market_volume_ += day_market_volume_;
    limit_volume_ += day_limit_volume_;
    day_market_volume_ = 0.0;
    day_limit_volume_ = 0.0;
    prev_equity_mid_ = equity_mid;
  }

  PnLSeries finish() {
    PnLSeries out;
    out.gross = std::move(gross_);
    out.linear_costs = std::move(linear_);
    out.impact_costs = std::move(impact_);
    out.net = std::move(net_);
    out.cum_net = std::move(cum_);
    out.end_position = std::move(end_q_);
    out.market_volume = market_volume_;
    out.limit_fill_volume = limit_volume_;
    out.sharpe = out.net.size() >= 2 ? compute_sharpe(out.net) : SharpeResult{};
    return out;
  }

 private:
  double q_ = 0.0;
  double cash_ = 0.0;
  double prev_equity_mid_ = 0.0;
  double day_market_volume_ = 0.0;
  double day_limit_volume_ = 0.0;
  double market_volume_ = 0.0;
  double limit_volume_ = 0.0;
  Eigen::ArrayXd gross_, linear_, impact_, net_, cum_, end_q_;
};

MarketParams day_params(const SimConfig& cfg, double alpha) {
  return MarketParams::make(cfg.mp.nu, cfg.mp.half_spread, 0.0,
                            cfg.mp.risk_aversion, alpha);
}

}  // namespace

PnLSeries run_daily_strategy(const PathSet& paths, const SimConfig& cfg,
                             bool with_costs) {
  Book book(paths.n_days);
  const double lam_nu = cfg.mp.risk_aversion * cfg.mp.nu;
  const double cost_rate = with_costs ? cfg.mp.half_spread : 0.0;
  for (int d = 0; d < paths.n_days; ++d) {
    const double target = paths.alpha_daily[d] / lam_nu;
    book.market_trade(target - book.position(), paths.price(d, 0));
    book.close_day(d, paths.price(d, paths.n_steps), cost_rate);
  }
  return book.finish();
}

PnLSeries run_hjb_market(const PathSet& paths, const SimConfig& cfg) {
  Book book(paths.n_days);
  const double sqrt_nu = std::sqrt(cfg.mp.nu);
  for (int d = 0; d < paths.n_days; ++d) {
    const MarketParams mp = day_params(cfg, paths.alpha_daily[d]);
    for (int k = 0; k < paths.n_steps; ++k) {
      const double t = cfg.tg.time_at(k);
      // fast-reversion form of the gain: g = beta sqrt(nu) eps / kappa
      const double g =
          cfg.beta * sqrt_nu * paths.epsilon(d, k) / cfg.ou_slow.kappa;
      const auto [b_buy, b_sell] = policy::nt_boundaries(t, g, mp, cfg.tg);
      const double q = book.position();
      if (q < b_buy)
        book.market_trade(b_buy - q, paths.price(d, k));
      else if (q > b_sell)
        book.market_trade(b_sell - q, paths.price(d, k));
    }
    book.close_day(d, paths.price(d, paths.n_steps), cfg.mp.half_spread);
  }
  return book.finish();
}

PnLSeries run_hjb_limit(const PathSet& paths, const SimConfig& cfg) {
  Book book(paths.n_days);
  const double sqrt_nu = std::sqrt(cfg.mp.nu);
  const double spread2 = 2.0 * cfg.mp.half_spread;
  for (int d = 0; d < paths.n_days; ++d) {
    const MarketParams mp = day_params(cfg, paths.alpha_daily[d]);
    for (int k = 0; k < paths.n_steps; ++k) {
      const double t = cfg.tg.time_at(k);
      const double g =
          cfg.beta * sqrt_nu * paths.epsilon(d, k) / cfg.ou_slow.kappa;
      const auto [p_buy, p_sell] = policy::fill_probability(
          cfg.beta_fast * paths.epsilon_fast(d, k), mp, cfg.tg);
      const policy::Boundaries bd =
          policy::limit_boundaries(t, g, p_buy, p_sell, mp, cfg.tg);
      const double q = book.position();
      const double mid = paths.price(d, k);
      const double step_move = paths.price(d, k + 1) - mid;
      switch (policy::classify_zone(q, bd).zone) {
        case policy::Zone::BuyMarket:
          book.market_trade(bd.buy_market - q, mid);
          break;
        case policy::Zone::SellMarket:
          book.market_trade(bd.sell_market - q, mid);
          break;
        case policy::Zone::BuyLimit:
          if (step_move <= -spread2) book.limit_fill(bd.buy - q, mid);
          break;
        case policy::Zone::SellLimit:
          if (step_move >= spread2) book.limit_fill(bd.sell - q, mid);
          break;
        case policy::Zone::MarketMake:
          break;  // replaced by no-trade in simulation
      }
    }
    book.close_day(d, paths.price(d, paths.n_steps), cfg.mp.half_spread);
  }
  return book.finish();
}

SharpeResult compute_sharpe(const Eigen::ArrayXd& daily_net) {
  const auto n = daily_net.size();
  if (n < 2)
    throw std::invalid_argument("compute_sharpe: need at least two records");
  const double mean = daily_net.mean();
  const double var = (daily_net - mean).square().sum() / (n - 1);
  const double sd = std::sqrt(var);
  SharpeResult r;
  if (sd <= 1e-12 * std::max(1.0, std::abs(mean))) {
    r.zero_variance = true;
    r.annualized = 0.0;
    return r;
  }
  r.annualized = mean / sd * std::sqrt(252.0);
  return r;
}

ExperimentReport run_experiment(const SimConfig& cfg) {
  const PathSet paths = generate_paths(cfg);
  ExperimentReport report;
  for (StrategyKind kind : cfg.strategies) {
    switch (kind) {
      case StrategyKind::DailyIdealNoCost:
        report.results.emplace_back(kind, run_daily_strategy(paths, cfg, false));
        break;
      case StrategyKind::DailyIdealWithCost:
        report.results.emplace_back(kind, run_daily_strategy(paths, cfg, true));
        break;
      case StrategyKind::HjbMarket:
        report.results.emplace_back(kind, run_hjb_market(paths, cfg));
        break;
      case StrategyKind::HjbMarketLimit:
        report.results.emplace_back(kind, run_hjb_limit(paths, cfg));
        break;
    }
  }
  return report;
}

}  // namespace axe::sim
