// axe command-line driver: simulation, band tabulation, closed-form residual
// checks and oracle comparisons, emitting plot-ready CSV and JSON reports.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "axe/checks.hpp"
#include "axe/config.hpp"
#include "axe/exact.hpp"
#include "axe/simulator.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << contents;
}

void write_snapshot(const fs::path& out_dir, const axe::config::FileConfig& cfg) {
  write_file(out_dir / "config_resolved.json", axe::config::make_snapshot(cfg));
}

int run_simulate(const axe::config::FileConfig& cfg, const fs::path& out_dir) {
  const axe::sim::ExperimentReport report = axe::sim::run_experiment(cfg.sim);

  for (const auto& [kind, pnl] : report.results) {
    std::string csv =
        "date_index,gross,linear_cost,impact_cost,net,cum_net,position_close\n";
    for (int d = 0; d < pnl.net.size(); ++d) {
      csv += std::to_string(d) + ',' + fmt(pnl.gross[d]) + ',' +
             fmt(pnl.linear_costs[d]) + ',' + fmt(pnl.impact_costs[d]) + ',' +
             fmt(pnl.net[d]) + ',' + fmt(pnl.cum_net[d]) + ',' +
             fmt(pnl.end_position[d]) + '\n';
    }
    write_file(out_dir / (std::string(axe::sim::strategy_name(kind)) + ".csv"),
               csv);
  }

  ordered_json summary;
  summary["version"] = kVersion;
  summary["seed"] = cfg.sim.seed;
  summary["n_days"] = cfg.sim.n_days;
  ordered_json strategies;
  for (const auto& [kind, pnl] : report.results) {
    strategies[axe::sim::strategy_name(kind)] = {
        {"sharpe_annualized", pnl.sharpe.annualized},
        {"zero_variance", pnl.sharpe.zero_variance},
        {"total_net", pnl.cum_net[pnl.cum_net.size() - 1]},
        {"market_volume", pnl.market_volume},
        {"limit_fill_volume", pnl.limit_fill_volume}};
  }
  summary["strategies"] = strategies;
  write_file(out_dir / "summary.json", summary.dump(2) + "\n");
  write_snapshot(out_dir, cfg);
  return 0;
}

int run_boundaries(const axe::config::FileConfig& cfg, const fs::path& out_dir) {
  const auto& bs = cfg.boundaries;
  const auto& tg = cfg.sim.tg;
  const bool with_fill = bs.p_fill_buy.has_value() || bs.p_fill_sell.has_value();
  const double p_buy = bs.p_fill_buy.value_or(0.0);
  const double p_sell = bs.p_fill_sell.value_or(0.0);

  std::string csv = with_fill
                        ? "t,x,p_fill_buy,p_fill_sell,buy_market,buy,sell,"
                          "sell_market\n"
                        : "t,x,buy_market,buy,sell,sell_market\n";
  for (int it = 0; it < bs.t_points; ++it) {
    const double t = tg.t_open + (tg.T - tg.t_open) * it / (bs.t_points - 1);
    for (int ix = 0; ix < bs.x_points; ++ix) {
      const double x =
          bs.x_points == 1
              ? bs.x_lo
              : bs.x_lo + (bs.x_hi - bs.x_lo) * ix / (bs.x_points - 1);
      const double alpha =
          axe::signals::zscore_alpha(cfg.sim.beta, cfg.sim.mp.nu, x);
      const double gain = axe::signals::integrated_gain(cfg.sim.ou_slow, alpha,
                                                        t, 2.0 * tg.T);
      const axe::policy::Boundaries bd =
          with_fill ? axe::policy::limit_boundaries(t, gain, p_buy, p_sell,
                                                    cfg.sim.mp, tg)
                    : axe::policy::market_only_boundaries(t, gain, cfg.sim.mp,
                                                          tg);
      csv += fmt(t) + ',' + fmt(x) + ',';
      if (with_fill) csv += fmt(p_buy) + ',' + fmt(p_sell) + ',';
      csv += fmt(bd.buy_market) + ',' + fmt(bd.buy) + ',' + fmt(bd.sell) +
             ',' + fmt(bd.sell_market) + '\n';
    }
  }
  write_file(out_dir / "boundaries.csv", csv);
  write_snapshot(out_dir, cfg);
  return 0;
}

int run_exact_check(const axe::config::FileConfig& cfg, const fs::path& out_dir,
                    const std::string& format) {
  const auto checks = axe::checks::run_exact_checks(cfg.exact_check, cfg.sim.tg);
  bool all_pass = true;
  for (const auto& c : checks) all_pass = all_pass && c.pass;

  if (format == "csv") {
    std::string csv = "name,value,tolerance,pass\n";
    for (const auto& c : checks)
      csv += c.name + ',' + fmt(c.value) + ',' + fmt(c.tolerance) + ',' +
             (c.pass ? "true" : "false") + '\n';
    write_file(out_dir / "exact_check.csv", csv);
  } else {
    ordered_json rep;
    rep["version"] = kVersion;
    ordered_json items = ordered_json::array();
    for (const auto& c : checks)
      items.push_back({{"name", c.name},
                       {"value", c.value},
                       {"tolerance", c.tolerance},
                       {"pass", c.pass}});
    rep["checks"] = items;
    rep["all_pass"] = all_pass;
    write_file(out_dir / "exact_check.json", rep.dump(2) + "\n");
  }
  write_snapshot(out_dir, cfg);
  return all_pass ? 0 : 1;
}

int run_oracle_compare(const axe::config::FileConfig& cfg,
                       const fs::path& out_dir, const std::string& format) {
  const auto det = axe::checks::run_det_compare(cfg.oracle.det, cfg.sim.tg);
  bool det_pass = true;
  for (const auto& r : det)
    det_pass = det_pass && r.sup_error < cfg.oracle.det.tolerance;

  std::vector<axe::checks::ExpansionCompareResult> expansion;
  bool exp_monotone = true, exp_improves = true;
  if (cfg.oracle.expansion.enabled) {
    expansion =
        axe::checks::run_expansion_compare(cfg.oracle.expansion, cfg.sim.tg);
    for (std::size_t i = 0; i < expansion.size(); ++i) {
      exp_improves = exp_improves &&
                     expansion[i].err_order1 < expansion[i].err_order0;
      if (i > 0)
        exp_monotone = exp_monotone &&
                       expansion[i].err_order1 < expansion[i - 1].err_order1;
    }
  }
  const bool all_pass = det_pass && exp_monotone && exp_improves;

  if (format == "csv") {
    std::string csv = "section,impact,metric,value\n";
    for (const auto& r : det) {
      csv += "det," + fmt(r.impact) + ",sup_error," + fmt(r.sup_error) + '\n';
      csv += "det," + fmt(r.impact) + ",stop_time," + fmt(r.stop_time) + '\n';
    }
    for (const auto& r : expansion) {
      csv += "expansion," + fmt(r.impact) + ",err_order0," +
             fmt(r.err_order0) + '\n';
      csv += "expansion," + fmt(r.impact) + ",err_order1," +
             fmt(r.err_order1) + '\n';
    }
    write_file(out_dir / "oracle_compare.csv", csv);
  } else {
    ordered_json rep;
    rep["version"] = kVersion;
    ordered_json det_items = ordered_json::array();
    for (const auto& r : det)
      det_items.push_back({{"impact", r.impact},
                           {"sup_error", r.sup_error},
                           {"stop_time", r.stop_time},
                           {"stops_after_close", r.stops_after_close},
                           {"tolerance", cfg.oracle.det.tolerance},
                           {"pass", r.sup_error < cfg.oracle.det.tolerance}});
    rep["det"] = det_items;
    ordered_json exp_items = ordered_json::array();
    for (const auto& r : expansion)
      exp_items.push_back({{"impact", r.impact},
                           {"err_order0", r.err_order0},
                           {"err_order1", r.err_order1}});
    rep["expansion"] = exp_items;
    rep["expansion_monotone"] = exp_monotone;
    rep["expansion_order1_improves"] = exp_improves;
    rep["all_pass"] = all_pass;
    write_file(out_dir / "oracle_compare.json", rep.dump(2) + "\n");
  }
  write_snapshot(out_dir, cfg);
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"alpha-execution engine driver"};
  app.require_subcommand(1);

  std::string config_path, out_dir_str, format = "json";
  std::uint64_t seed_override = 0;
  bool has_seed = false;

  for (const char* name :
       {"simulate", "boundaries", "exact-check", "oracle-compare"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON config path")->required();
    sub->add_option("--out", out_dir_str, "output directory")->required();
    sub->add_option("--seed", seed_override, "seed override")
        ->each([&](const std::string&) { has_seed = true; });
    sub->add_option("--format", format, "report format")
        ->check(CLI::IsMember({"csv", "json"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (app.exit(e) == 0) return 0;  // --help
    std::cerr << "error: invalid arguments\n";
    return 2;
  }

  try {
    axe::config::FileConfig cfg = axe::config::load_config(config_path);
    if (has_seed) cfg.sim.seed = seed_override;

    const fs::path out_dir(out_dir_str);
    fs::create_directories(out_dir);

    if (app.got_subcommand("simulate")) return run_simulate(cfg, out_dir);
    if (app.got_subcommand("boundaries")) return run_boundaries(cfg, out_dir);
    if (app.got_subcommand("exact-check"))
      return run_exact_check(cfg, out_dir, format);
    return run_oracle_compare(cfg, out_dir, format);
  } catch (const axe::config::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
