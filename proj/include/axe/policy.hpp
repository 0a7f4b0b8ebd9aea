#pragma once

#include "axe/signals.hpp"

namespace axe::policy {

using signals::OuParams;
using signals::SignalState;
using signals::TimeGrid;

/// Scalar model constants. q_bar (the risk-adjusted daily target position)
/// is derived as alpha_bar / (risk_aversion * nu); use make() so the
/// consistency invariant holds by construction.
struct MarketParams {
  double nu = 0.0;           // price variance rate (price^2 / day)
  double half_spread = 0.0;  // C, per-unit cost of crossing the spread
  double impact = 0.0;       // K, temporary impact coefficient
  double impact_exponent = 2.0;
  double risk_aversion = 0.0;  // lambda
  double alpha_bar = 0.0;      // constant-within-day drift
  double q_bar = 0.0;          // target position alpha_bar / (lambda nu)

  static MarketParams make(double nu, double half_spread, double impact,
                           double risk_aversion, double alpha_bar,
                           double impact_exponent = 2.0);

  void validate() const;
};

/// Position edges of the trading regions, ordered
///   buy_market <= buy <= sell <= sell_market.
/// Below buy_market we cross the spread to buy; between buy_market and buy
/// a buy limit order is preferred; inside [buy, sell] no order improves the
/// objective; the sell side mirrors. In market-only mode the outer edges
/// coincide with the inner ones.
struct Boundaries {
  double buy_market = 0.0;   // b-tilde-plus
  double buy = 0.0;          // b-plus
  double sell = 0.0;         // b-minus
  double sell_market = 0.0;  // b-tilde-minus

  bool ordered() const {
    return buy_market <= buy && buy <= sell && sell <= sell_market;
  }
};

enum class Zone { BuyMarket, BuyLimit, MarketMake, SellLimit, SellMarket };

/// Trading action: the zone the position falls in and the position to trade
/// toward (the inner edge of that zone; the position itself inside the
/// market-making band).
struct ZoneDecision {
  Zone zone = Zone::MarketMake;
  double target = 0.0;
};

enum class TradingMode { MarketOnly, MarketAndLimit };

/// Objective-function approximation used by the live policy:
///   V = 1/2 lambda nu (2T - t) (q - q_bar)^2.
double value_approx(double t, double q, const MarketParams& mp,
                    const TimeGrid& tg);

/// dV/dq of the approximate objective: lambda nu (2T - t)(q - q_bar).
double dvalue_dq(double t, double q, const MarketParams& mp,
                 const TimeGrid& tg);

/// No-trade band around q_bar for market orders:
///   b(+/-) = q_bar + (g -/+ C) / (lambda nu (2T - t)).
/// Returns {buy, sell} = {b_plus, b_minus}, buy <= sell.
std::pair<double, double> nt_boundaries(double t, double gain,
                                        const MarketParams& mp,
                                        const TimeGrid& tg);

/// All four edges when limit orders are allowed; the outer (market) edges
/// widen the band by the factor (1 + P) / (1 - P) on the spread term.
Boundaries limit_boundaries(double t, double gain, double p_fill_buy,
                            double p_fill_sell, const MarketParams& mp,
                            const TimeGrid& tg);

/// Market-only band packaged as Boundaries (outer edges collapsed onto the
/// inner ones).
Boundaries market_only_boundaries(double t, double gain,
                                  const MarketParams& mp, const TimeGrid& tg);

/// Five-way classification of a position against ordered boundaries. Ties
/// belong to the inner (less aggressive) zone.
ZoneDecision classify_zone(double q, const Boundaries& bd);

/// Optimal trading rate under quadratic impact:
///   u = (g - C - dVdq)_+ / 2K - (-g - C + dVdq)_+ / 2K
/// with (x)_+ = x for x > 0 and 0 otherwise (zero on the band edge).
double trade_rate_quadratic(double gain, double dvdq, const MarketParams& mp);

/// Optimal trading rate for impact cost K |u|^p, p > 1; reduces to the
/// quadratic rate at p = 2.
double trade_rate_power(double gain, double dvdq, const MarketParams& mp);

/// Probability that a top-of-book buy/sell limit order fills within one
/// decision step, given the effective fast drift z-score (price drift
/// sqrt(nu) * epsilon_fast):
///   P(+/-) = Phi((-/+ sqrt(nu) eps - 2C/dt) / sqrt(nu/dt)),
/// clamped to [0, 1 - 1e-6] so the market edges stay finite.
std::pair<double, double> fill_probability(double epsilon_fast,
                                           const MarketParams& mp,
                                           const TimeGrid& tg);

/// Signal model wiring z-scores to price-drift units; needed to turn a
/// SignalState into a gain and fill probabilities.
struct SignalModel {
  OuParams slow;   // intraday predictor driving the gain
  OuParams fast;   // short-horizon predictor driving fills
  double beta = 0.0;
  double beta_fast = 0.0;
};

/// Full decision: integrated gain from the slow signal, fill probabilities
/// from the fast one (limit mode), then classification. Market-only mode
/// uses the collapsed band; its MarketMake outcome means "do not trade".
ZoneDecision decide(double t, const SignalState& state, double q,
                    const MarketParams& mp, const SignalModel& sm,
                    const TimeGrid& tg, TradingMode mode);

}  // namespace axe::policy
