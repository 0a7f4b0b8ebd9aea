#include "axe/config.hpp"

#include <fstream>

#include <json.hpp>

namespace axe::config {

namespace {

using ordered_json = nlohmann::ordered_json;

double get_num(const ordered_json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number())
    throw ConfigError(std::string("config: '") + key + "' must be a number");
  return j.at(key).get<double>();
}

int get_int(const ordered_json& j, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer())
    throw ConfigError(std::string("config: '") + key + "' must be an integer");
  return j.at(key).get<int>();
}

sim::StrategyKind strategy_from_name(const std::string& name) {
  using sim::StrategyKind;
  if (name == "daily_ideal_no_cost") return StrategyKind::DailyIdealNoCost;
  if (name == "daily_ideal_with_cost") return StrategyKind::DailyIdealWithCost;
  if (name == "hjb_market") return StrategyKind::HjbMarket;
  if (name == "hjb_market_limit") return StrategyKind::HjbMarketLimit;
  throw ConfigError("config: unknown strategy '" + name + "'");
}

}  // namespace

FileConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  ordered_json j;
  try {
    j = ordered_json::parse(in);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: parse error: ") + e.what());
  }

  FileConfig cfg;
  cfg.sim = sim::SimConfig::default_experiment(20240905ULL);

  try {
    const ordered_json tg = j.value("time_grid", ordered_json::object());
    const double day_len = get_num(tg, "day_length_days", 1.0);
    const double step_min = get_num(tg, "step_minutes", 1.0);
    const int steps = get_int(tg, "session_steps", 390);
    cfg.sim.tg = signals::TimeGrid::session(day_len, steps, step_min / 1440.0);

    const ordered_json mk = j.value("market", ordered_json::object());
    const double nu = get_num(mk, "price_variance_per_day", 0.01);
    const double spread = get_num(mk, "half_spread_price", 0.01);
    const double impact = get_num(mk, "impact_coefficient", 0.0);
    const double exponent = get_num(mk, "impact_exponent", 2.0);
    const double lambda = get_num(mk, "risk_aversion", 37.4);
    const double drift = get_num(mk, "daily_drift", 0.0);
    cfg.sim.mp =
        policy::MarketParams::make(nu, spread, impact, lambda, drift, exponent);

    const ordered_json sg = j.value("signals", ordered_json::object());
    const ordered_json slow = sg.value("slow", ordered_json::object());
    const ordered_json fast = sg.value("fast", ordered_json::object());
    const ordered_json daily = sg.value("daily", ordered_json::object());
    cfg.sim.ou_slow = signals::OuParams::from_reversion_time(
        get_num(slow, "reversion_minutes", 30.0) / 1440.0);
    cfg.sim.beta = get_num(slow, "beta", 1.0);
    cfg.sim.ou_fast = signals::OuParams::from_reversion_time(
        get_num(fast, "reversion_minutes", 1.0) / 1440.0);
    cfg.sim.beta_fast = get_num(fast, "beta", 13.0);
    cfg.sim.daily.reversion_days = get_num(daily, "reversion_days", 10.0);
    cfg.sim.daily.annual_sharpe = get_num(daily, "annual_sharpe", 2.1);

    const ordered_json sm = j.value("simulation", ordered_json::object());
    cfg.sim.n_days = get_int(sm, "n_days", 1260);
    cfg.sim.seed = static_cast<std::uint64_t>(
        get_num(sm, "seed", 20240905.0));
    cfg.sim.initial_price = get_num(sm, "initial_price", 100.0);
    if (sm.contains("strategies")) {
      cfg.sim.strategies.clear();
      for (const auto& s : sm.at("strategies"))
        cfg.sim.strategies.push_back(strategy_from_name(s.get<std::string>()));
    }

    const ordered_json bd = j.value("boundaries", ordered_json::object());
    cfg.boundaries.t_points = get_int(bd, "t_points", 40);
    cfg.boundaries.x_lo = get_num(bd, "x_lo", -3.0);
    cfg.boundaries.x_hi = get_num(bd, "x_hi", 3.0);
    cfg.boundaries.x_points = get_int(bd, "x_points", 13);
    if (bd.contains("p_fill_buy"))
      cfg.boundaries.p_fill_buy = get_num(bd, "p_fill_buy", 0.0);
    if (bd.contains("p_fill_sell"))
      cfg.boundaries.p_fill_sell = get_num(bd, "p_fill_sell", 0.0);
    if (cfg.boundaries.t_points < 2 || cfg.boundaries.x_points < 1 ||
        cfg.boundaries.x_hi < cfg.boundaries.x_lo)
      throw ConfigError("config: malformed boundaries grid");
    for (const auto& p : {cfg.boundaries.p_fill_buy, cfg.boundaries.p_fill_sell})
      if (p && (*p < 0.0 || *p >= 1.0))
        throw ConfigError("config: fill probabilities must lie in [0, 1)");

    const ordered_json ec = j.value("exact_check", ordered_json::object());
    auto& x = cfg.exact_check;
    x.nu = get_num(ec, "price_variance_per_day", x.nu);
    x.lambda = get_num(ec, "risk_aversion", x.lambda);
    x.impact = get_num(ec, "impact_coefficient", x.impact);
    x.kappa = get_num(ec, "signal_reversion_rate", x.kappa);
    x.eta = get_num(ec, "signal_variance_rate", x.eta);
    x.riccati_points = get_int(ec, "riccati_points", x.riccati_points);
    x.grid_t = get_int(ec, "grid_t", x.grid_t);
    x.grid_x = get_int(ec, "grid_x", x.grid_x);
    x.grid_q = get_int(ec, "grid_q", x.grid_q);
    x.det_half_spread = get_num(ec, "det_half_spread", x.det_half_spread);
    x.det_q_bar = get_num(ec, "det_q_bar", x.det_q_bar);
    x.det_reversion_minutes =
        get_num(ec, "det_reversion_minutes", x.det_reversion_minutes);
    x.det_impact = get_num(ec, "det_impact", x.det_impact);
    x.det_q0 = get_num(ec, "det_q0", x.det_q0);
    x.det_x0 = get_num(ec, "det_x0", x.det_x0);
    const ordered_json tol = ec.value("tolerances", ordered_json::object());
    x.tol.gain_pde = get_num(tol, "gain_pde", x.tol.gain_pde);
    x.tol.riccati = get_num(tol, "riccati", x.tol.riccati);
    x.tol.quadcost_hjb = get_num(tol, "quadcost_hjb", x.tol.quadcost_hjb);
    x.tol.euler_lagrange = get_num(tol, "euler_lagrange", x.tol.euler_lagrange);
    x.tol.stopping = get_num(tol, "stopping", x.tol.stopping);

    const ordered_json oc = j.value("oracle_compare", ordered_json::object());
    const ordered_json det = oc.value("det", ordered_json::object());
    auto& dc = cfg.oracle.det;
    dc.nu = get_num(det, "price_variance_per_day", dc.nu);
    dc.lambda = get_num(det, "risk_aversion", dc.lambda);
    dc.half_spread = get_num(det, "half_spread_price", dc.half_spread);
    dc.q_bar = get_num(det, "q_bar", dc.q_bar);
    dc.reversion_minutes = get_num(det, "reversion_minutes", dc.reversion_minutes);
    dc.q0 = get_num(det, "q0", dc.q0);
    dc.x0 = get_num(det, "x0", dc.x0);
    dc.tolerance = get_num(det, "tolerance", dc.tolerance);
    if (det.contains("impact_sweep")) {
      dc.impact_sweep.clear();
      for (const auto& k : det.at("impact_sweep"))
        dc.impact_sweep.push_back(k.get<double>());
      if (dc.impact_sweep.empty())
        throw ConfigError("config: det impact_sweep must be non-empty");
    }
    for (double k : dc.impact_sweep)
      if (!(k > 0.0)) throw ConfigError("config: det impacts must be > 0");

    const ordered_json exp = oc.value("expansion", ordered_json::object());
    auto& xc = cfg.oracle.expansion;
    xc.enabled = exp.value("enabled", xc.enabled);
    xc.nu = get_num(exp, "price_variance_per_day", xc.nu);
    xc.lambda = get_num(exp, "risk_aversion", xc.lambda);
    xc.half_spread = get_num(exp, "half_spread_price", xc.half_spread);
    xc.q_bar = get_num(exp, "q_bar", xc.q_bar);
    xc.kappa = get_num(exp, "signal_reversion_rate", xc.kappa);
    xc.signal_sd = get_num(exp, "signal_sd", xc.signal_sd);
    xc.nx = get_int(exp, "nx", xc.nx);
    xc.nq = get_int(exp, "nq", xc.nq);
    xc.nt = get_int(exp, "nt", xc.nt);
    xc.x_halfwidth_sds = get_num(exp, "x_halfwidth_sds", xc.x_halfwidth_sds);
    xc.t_window_lo_frac = get_num(exp, "t_window_lo_frac", xc.t_window_lo_frac);
    xc.t_window_hi_frac = get_num(exp, "t_window_hi_frac", xc.t_window_hi_frac);
    xc.x_window_sds = get_num(exp, "x_window_sds", xc.x_window_sds);
    if (exp.contains("impact_sweep")) {
      xc.impact_sweep.clear();
      for (const auto& k : exp.at("impact_sweep"))
        xc.impact_sweep.push_back(k.get<double>());
    }

    cfg.sim.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  cfg.resolved_snapshot = make_snapshot(cfg);
  return cfg;
}

std::string make_snapshot(const FileConfig& cfg) {
  ordered_json snap;
  snap["time_grid"] = {{"day_length_days", cfg.sim.tg.T},
                       {"step_minutes", cfg.sim.tg.dt * 1440.0},
                       {"session_steps", cfg.sim.tg.n_steps}};
  snap["market"] = {{"price_variance_per_day", cfg.sim.mp.nu},
                    {"half_spread_price", cfg.sim.mp.half_spread},
                    {"impact_coefficient", cfg.sim.mp.impact},
                    {"impact_exponent", cfg.sim.mp.impact_exponent},
                    {"risk_aversion", cfg.sim.mp.risk_aversion},
                    {"daily_drift", cfg.sim.mp.alpha_bar}};
  snap["signals"] = {
      {"slow",
       {{"reversion_minutes", 1440.0 / cfg.sim.ou_slow.kappa},
        {"beta", cfg.sim.beta}}},
      {"fast",
       {{"reversion_minutes", 1440.0 / cfg.sim.ou_fast.kappa},
        {"beta", cfg.sim.beta_fast}}},
      {"daily",
       {{"reversion_days", cfg.sim.daily.reversion_days},
        {"annual_sharpe", cfg.sim.daily.annual_sharpe}}}};
  ordered_json strategies = ordered_json::array();
  for (auto s : cfg.sim.strategies) strategies.push_back(sim::strategy_name(s));
  snap["simulation"] = {{"n_days", cfg.sim.n_days},
                        {"seed", cfg.sim.seed},
                        {"initial_price", cfg.sim.initial_price},
                        {"strategies", strategies}};
  return snap.dump(2) + "\n";
}

}  // namespace axe::config
