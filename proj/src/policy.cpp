#include "axe/policy.hpp"

#include <cmath>
#include <stdexcept>

namespace axe::policy {

namespace {
constexpr double kFillCap = 1.0 - 1e-6;

double positive_part(double x) { return x > 0.0 ? x : 0.0; }
}  // namespace

MarketParams MarketParams::make(double nu, double half_spread, double impact,
                                double risk_aversion, double alpha_bar,
                                double impact_exponent) {
  MarketParams mp;
  mp.nu = nu;
  mp.half_spread = half_spread;
  mp.impact = impact;
  mp.impact_exponent = impact_exponent;
  mp.risk_aversion = risk_aversion;
  mp.alpha_bar = alpha_bar;
  mp.q_bar = alpha_bar / (risk_aversion * nu);
  mp.validate();
  return mp;
}

void MarketParams::validate() const {
  if (!(nu > 0.0)) throw std::invalid_argument("MarketParams: nu must be > 0");
  if (!(half_spread >= 0.0))
    throw std::invalid_argument("MarketParams: half_spread must be >= 0");
  if (!(impact >= 0.0))
    throw std::invalid_argument("MarketParams: impact must be >= 0");
  if (!(risk_aversion > 0.0))
    throw std::invalid_argument("MarketParams: risk_aversion must be > 0");
  if (!(impact_exponent > 1.0))
    throw std::invalid_argument("MarketParams: impact exponent must be > 1");
  if (std::abs(q_bar * risk_aversion * nu - alpha_bar) >
      1e-12 * std::max(1.0, std::abs(alpha_bar)))
    throw std::invalid_argument("MarketParams: q_bar inconsistent");
}

double value_approx(double t, double q, const MarketParams& mp,
                    const TimeGrid& tg) {
  if (t > tg.T) throw std::invalid_argument("value_approx: t > T");
  const double dq = q - mp.q_bar;
  return 0.5 * mp.risk_aversion * mp.nu * (2.0 * tg.T - t) * dq * dq;
}

double dvalue_dq(double t, double q, const MarketParams& mp,
                 const TimeGrid& tg) {
  if (t > tg.T) throw std::invalid_argument("dvalue_dq: t > T");
  return mp.risk_aversion * mp.nu * (2.0 * tg.T - t) * (q - mp.q_bar);
}

std::pair<double, double> nt_boundaries(double t, double gain,
                                        const MarketParams& mp,
                                        const TimeGrid& tg) {
  if (t >= 2.0 * tg.T)
    throw std::invalid_argument("nt_boundaries: t must be < 2T");
  const double scale = mp.risk_aversion * mp.nu * (2.0 * tg.T - t);
  const double buy = mp.q_bar + (gain - mp.half_spread) / scale;
  const double sell = mp.q_bar + (gain + mp.half_spread) / scale;
  return {buy, sell};
}

Boundaries limit_boundaries(double t, double gain, double p_fill_buy,
                            double p_fill_sell, const MarketParams& mp,
                            const TimeGrid& tg) {
  if (p_fill_buy < 0.0 || p_fill_buy >= 1.0 || p_fill_sell < 0.0 ||
      p_fill_sell >= 1.0)
    throw std::invalid_argument("limit_boundaries: fill probs must be in [0,1)");
  const auto [buy, sell] = nt_boundaries(t, gain, mp, tg);
  const double scale = mp.risk_aversion * mp.nu * (2.0 * tg.T - t);
  Boundaries bd;
  bd.buy = buy;
  bd.sell = sell;
  bd.buy_market =
      mp.q_bar +
      (gain - mp.half_spread * (1.0 + p_fill_buy) / (1.0 - p_fill_buy)) / scale;
  bd.sell_market =
      mp.q_bar +
      (gain + mp.half_spread * (1.0 + p_fill_sell) / (1.0 - p_fill_sell)) /
          scale;
  return bd;
}

Boundaries market_only_boundaries(double t, double gain,
                                  const MarketParams& mp, const TimeGrid& tg) {
  const auto [buy, sell] = nt_boundaries(t, gain, mp, tg);
  return Boundaries{buy, buy, sell, sell};
}

ZoneDecision classify_zone(double q, const Boundaries& bd) {
  if (!bd.ordered() || !std::isfinite(q))
    throw std::invalid_argument("classify_zone: boundaries not ordered");
  if (q < bd.buy_market) return {Zone::BuyMarket, bd.buy_market};
  if (q < bd.buy) return {Zone::BuyLimit, bd.buy};
  if (q <= bd.sell) return {Zone::MarketMake, q};
  if (q <= bd.sell_market) return {Zone::SellLimit, bd.sell};
  return {Zone::SellMarket, bd.sell_market};
}

double trade_rate_quadratic(double gain, double dvdq, const MarketParams& mp) {
  if (!(mp.impact > 0.0))
    throw std::invalid_argument("trade_rate_quadratic: K must be > 0");
  const double buy = positive_part(gain - mp.half_spread - dvdq);
  const double sell = positive_part(-gain - mp.half_spread + dvdq);
  return (buy - sell) / (2.0 * mp.impact);
}

double trade_rate_power(double gain, double dvdq, const MarketParams& mp) {
  if (!(mp.impact > 0.0))
    throw std::invalid_argument("trade_rate_power: K must be > 0");
  const double p = mp.impact_exponent;
  if (!(p > 1.0))
    throw std::invalid_argument("trade_rate_power: exponent must be > 1");
  const double inv = 1.0 / (p - 1.0);
  const double scale = std::pow(1.0 / (p * mp.impact), inv);
  const double buy = positive_part(gain - mp.half_spread - dvdq);
  const double sell = positive_part(-gain - mp.half_spread + dvdq);
  return scale * (std::pow(buy, inv) - std::pow(sell, inv));
}

std::pair<double, double> fill_probability(double epsilon_fast,
                                           const MarketParams& mp,
                                           const TimeGrid& tg) {
  const double rate_sd = std::sqrt(mp.nu / tg.dt);
  const double spread_rate = 2.0 * mp.half_spread / tg.dt;
  const double drift = std::sqrt(mp.nu) * epsilon_fast;
  const double p_buy =
      std::clamp(normal_cdf((-drift - spread_rate) / rate_sd), 0.0, kFillCap);
  const double p_sell =
      std::clamp(normal_cdf((drift - spread_rate) / rate_sd), 0.0, kFillCap);
  return {p_buy, p_sell};
}

ZoneDecision decide(double t, const SignalState& state, double q,
                    const MarketParams& mp, const SignalModel& sm,
                    const TimeGrid& tg, TradingMode mode) {
  if (t < tg.t_open || t > tg.T)
    throw std::invalid_argument("decide: t outside the session");
  const double x =
      signals::zscore_alpha(sm.beta, mp.nu, state.epsilon);
  const double gain = signals::integrated_gain(sm.slow, x, t, tg.horizon());
  Boundaries bd;
  if (mode == TradingMode::MarketAndLimit) {
    const auto [p_buy, p_sell] =
        fill_probability(sm.beta_fast * state.epsilon_fast, mp, tg);
    bd = limit_boundaries(t, gain, p_buy, p_sell, mp, tg);
  } else {
    bd = market_only_boundaries(t, gain, mp, tg);
  }
  ZoneDecision d = classify_zone(q, bd);
  if (mode == TradingMode::MarketOnly) {
    // collapsed band: only market orders or no action are possible
    if (d.zone == Zone::BuyLimit) d = {Zone::BuyMarket, bd.buy_market};
    if (d.zone == Zone::SellLimit) d = {Zone::SellMarket, bd.sell_market};
  }
  return d;
}

}  // namespace axe::policy
