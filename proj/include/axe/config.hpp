#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "axe/simulator.hpp"

namespace axe::config {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Grid spec for the band-surface tabulation command.
struct BoundariesSpec {
  int t_points = 40;
  double x_lo = -3.0;  // slow-signal z-score range
  double x_hi = 3.0;
  int x_points = 13;
  std::optional<double> p_fill_buy;   // fixed fill probabilities; when absent
  std::optional<double> p_fill_sell;  // only the inner band is distinct
};

struct ExactCheckTolerances {
  double gain_pde = 1e-6;
  double riccati = 1e-8;
  double quadcost_hjb = 1e-4;
  double euler_lagrange = 1e-6;
  double stopping = 1e-9;
};

/// Scenario for the closed-form consistency report.
struct ExactCheckSpec {
  // quadratic-cost scenario (zero spread)
  double nu = 0.01;
  double lambda = 50.0;
  double impact = 0.5;
  double kappa = 4.0;
  double eta = 0.04;
  int riccati_points = 1000;
  int grid_t = 50;
  int grid_x = 20;
  int grid_q = 20;
  // deterministic-trajectory scenario
  double det_nu = 0.01;
  double det_lambda = 50.0;
  double det_half_spread = 0.1;
  double det_q_bar = 1.0;
  double det_reversion_minutes = 20.0;
  double det_impact = 1e-3;
  double det_q0 = 1.6;
  double det_x0 = 0.5;
  ExactCheckTolerances tol;
};

/// Deterministic-trajectory-vs-discrete-optimizer comparison.
struct DetCompareSpec {
  double nu = 0.01;
  double lambda = 50.0;
  double half_spread = 0.1;
  double q_bar = 1.0;
  double reversion_minutes = 20.0;
  double q0 = 1.6;
  double x0 = 0.5;
  std::vector<double> impact_sweep = {1e-4, 4e-4, 1.2e-3, 4e-3};
  double tolerance = 1e-3;
};

/// Expansion-vs-grid-solver comparison in the slow-trading regime.
struct ExpansionCompareSpec {
  bool enabled = true;
  double nu = 0.01;
  double lambda = 50.0;
  double half_spread = 0.005;
  double q_bar = 0.0;
  double kappa = 8.0;
  double signal_sd = 0.05;  // stationary sd of the alpha signal
  std::vector<double> impact_sweep = {1.0, 2.0, 4.0, 8.0};
  int nx = 41;
  int nq = 321;
  double x_halfwidth_sds = 4.0;
  int nt = 0;  // 0: minimum stable step count
  double t_window_lo_frac = 0.2;   // comparison window within the session
  double t_window_hi_frac = 0.9;
  double x_window_sds = 2.0;
};

struct OracleCompareSpec {
  DetCompareSpec det;
  ExpansionCompareSpec expansion;
};

/// Fully resolved file configuration: simulation settings plus the
/// command-specific sections, and the snapshot that reproduces them.
struct FileConfig {
  sim::SimConfig sim;
  BoundariesSpec boundaries;
  ExactCheckSpec exact_check;
  OracleCompareSpec oracle;
  std::string resolved_snapshot;  // serialized resolved configuration
};

/// Parses and validates a JSON config file; every invariant is checked
/// before any computation starts. Throws ConfigError on malformed input.
FileConfig load_config(const std::string& path);

/// Serialized resolved configuration (stable key order, reproducible bytes).
std::string make_snapshot(const FileConfig& cfg);

}  // namespace axe::config
