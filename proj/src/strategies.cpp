#include "marketsim/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace marketsim {

const char* to_string(AgentType t) {
    switch (t) {
        case AgentType::Value: return "value";
        case AgentType::Momentum: return "momentum";
        case AgentType::MarketMaker: return "market_maker";
        case AgentType::Contrarian: return "contrarian";
        case AgentType::News: return "news";
        case AgentType::Optimistic: return "optimistic";
        case AgentType::Pessimistic: return "pessimistic";
        case AgentType::Speculator: return "speculator";
        case AgentType::Random: return "random";
        case AgentType::AlwaysBuy: return "always_buy";
        case AgentType::AlwaysSell: return "always_sell";
        case AgentType::Hold: return "hold";
        case AgentType::Llm: return "llm";
    }
    return "unknown";
}

AgentType agent_type_from_string(const std::string& s) {
    for (AgentType t : {AgentType::Value, AgentType::Momentum, AgentType::MarketMaker,
                        AgentType::Contrarian, AgentType::News, AgentType::Optimistic,
                        AgentType::Pessimistic, AgentType::Speculator, AgentType::Random,
                        AgentType::AlwaysBuy, AgentType::AlwaysSell, AgentType::Hold,
                        AgentType::Llm})
        if (s == to_string(t)) return t;
    throw std::invalid_argument("unknown agent type: " + s);
}

std::int64_t size_rule(double q_star, std::int64_t resource_shares, double max_fraction) {
    const auto q_max = static_cast<std::int64_t>(
        std::floor(max_fraction * static_cast<double>(resource_shares)));
    const auto q = std::llround(q_star);  // round half away from zero
    return std::clamp<std::int64_t>(q, 0, std::max<std::int64_t>(q_max, 0));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double market_order_probability(const LinearCoefficients& c, double abs_q,
                                double abs_dp) {
    return normal_cdf(c.gamma0 + c.gamma1 * abs_q + c.gamma2 * abs_dp);
}

double history_mean_price(const MarketSnapshot& snapshot, int window) {
    if (snapshot.price_history.empty()) return money_to_double(snapshot.last_price);
    double sum = 0.0;
    int n = 0;
    for (const auto& h : snapshot.price_history) {
        if (n == window) break;
        sum += money_to_double(h.price);
        ++n;
    }
    return sum / n;
}

double history_price_sigma(const MarketSnapshot& snapshot, int window, double floor) {
    const double mean = history_mean_price(snapshot, window);
    double ss = 0.0;
    int n = 0;
    for (const auto& h : snapshot.price_history) {
        if (n == window) break;
        const double d = money_to_double(h.price) - mean;
        ss += d * d;
        ++n;
    }
    const double sigma = n > 0 ? std::sqrt(ss / n) : 0.0;
    return std::max(sigma, floor);
}

namespace {

double last_price_change(const MarketSnapshot& s) {
    if (s.price_history.size() < 2) return 0.0;
    return money_to_double(s.price_history[0].price) -
           money_to_double(s.price_history[1].price);
}

double last_volume_change(const MarketSnapshot& s) {
    if (s.price_history.size() < 2) return 0.0;
    return static_cast<double>(s.price_history[0].volume - s.price_history[1].volume);
}

// Shares-equivalent resource for one side at a reference price.
std::int64_t side_resource(Side side, const AgentAccount& account,
                           const MarketSnapshot& snapshot, Money ref_price) {
    if (side == Side::Sell) return account.available_shares();
    Money px = ref_price;
    if (px <= 0) px = snapshot.depth.best_ask.value_or(snapshot.last_price);
    if (px <= 0) return 0;
    return account.available_cash() / px;
}

OrderRequest make_request(Side side, OrderKind kind, std::int64_t qty,
                          std::optional<Money> limit) {
    OrderRequest r;
    r.side = side;
    r.kind = kind;
    r.quantity = qty;
    if (kind == OrderKind::Limit) r.price_limit = limit;
    return r;
}

TradeDecision hold_decision(const MarketSnapshot& s, const std::string& why) {
    TradeDecision d;
    d.valuation = s.fundamental_estimate ? money_to_double(*s.fundamental_estimate)
                                         : money_to_double(s.last_price);
    d.price_target = money_to_double(s.last_price);
    d.valuation_reasoning = why;
    d.price_target_reasoning = "no directional view";
    d.reasoning = why;
    d.replace_decision = ReplaceDecision::Add;
    return d;
}

// Emits a one-order decision sized to the max_fraction cap.
TradeDecision directional(Side side, OrderKind kind, Money limit_price,
                          const MarketSnapshot& snapshot, const AgentAccount& account,
                          const StrategyParams& params, double valuation,
                          double price_target, const std::string& reasoning) {
    const Money ref = kind == OrderKind::Limit
                          ? limit_price
                          : snapshot.depth.best_ask.value_or(snapshot.last_price);
    const std::int64_t resource = side_resource(side, account, snapshot, ref);
    const std::int64_t qty =
        size_rule(params.max_fraction * static_cast<double>(resource), resource,
                  params.max_fraction);
    TradeDecision d;
    d.valuation = valuation;
    d.price_target = price_target;
    d.valuation_reasoning = reasoning;
    d.price_target_reasoning = reasoning;
    d.reasoning = reasoning;
    d.replace_decision = ReplaceDecision::Replace;
    if (qty > 0)
        d.orders.push_back(make_request(side, kind, qty, limit_price));
    return d;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(2);
    os << std::fixed << v;
    return os.str();
}

TradeDecision value_decide(const StrategyParams& p, const MarketSnapshot& s,
                           const AgentAccount& a) {
    if (!s.fundamental_estimate) return hold_decision(s, "fundamental unavailable");
    const Money v = *s.fundamental_estimate;
    const double ratio = static_cast<double>(s.last_price) / static_cast<double>(v);
    const bool market = std::abs(ratio - 1.0) > p.beta;
    if (ratio < 1.0 - p.alpha) {
        const Money ref = money_round(static_cast<double>(v) * (1.0 - p.alpha));
        return directional(Side::Buy, market ? OrderKind::Market : OrderKind::Limit, ref,
                           s, a, p, money_to_double(v), money_to_double(ref),
                           "price " + money_to_string(s.last_price) +
                               " is below fundamental value (ratio " + fmt(ratio) +
                               "); asset undervalued, buying");
    }
    if (ratio > 1.0 + p.alpha) {
        const Money ref = money_round(static_cast<double>(v) * (1.0 + p.alpha));
        return directional(Side::Sell, market ? OrderKind::Market : OrderKind::Limit, ref,
                           s, a, p, money_to_double(v), money_to_double(ref),
                           "price " + money_to_string(s.last_price) +
                               " is above fundamental value (ratio " + fmt(ratio) +
                               "); asset overvalued, selling");
    }
    return hold_decision(s, "price/fundamental ratio " + fmt(ratio) +
                                " is inside the fair-value band");
}

TradeDecision momentum_decide(const StrategyParams& p, const MarketSnapshot& s,
                              const AgentAccount& a) {
    const double dp = last_price_change(s);
    const double dvol = last_volume_change(s);
    const double sigma = history_price_sigma(s, p.vol_window, p.sigma_floor);
    const bool market = std::abs(dp) > sigma;
    const std::string why = "price change " + fmt(dp) + ", volume change " + fmt(dvol) +
                            "; following the trend";
    if (dp > 0 && dvol > 0)
        return directional(Side::Buy, market ? OrderKind::Market : OrderKind::Limit,
                           s.last_price, s, a, p, money_to_double(s.last_price) + dp,
                           money_to_double(s.last_price) + dp, why);
    if (dp < 0 || dvol < 0)
        return directional(Side::Sell, market ? OrderKind::Market : OrderKind::Limit,
                           s.last_price, s, a, p, money_to_double(s.last_price) + dp,
                           money_to_double(s.last_price) + dp, why);
    return hold_decision(s, "no established trend");
}

TradeDecision maker_decide(const StrategyParams& p, const MarketSnapshot& s,
                           const AgentAccount& a) {
    const double price = static_cast<double>(s.last_price);
    const double pbar = history_mean_price(s, p.ma_window) * 100.0;
    const double sigma = history_price_sigma(s, p.vol_window, p.sigma_floor) * 100.0;
    const double half = std::clamp(std::max(0.01, p.lambda * sigma / price), 0.01,
                                   p.max_half_spread);
    const Money bid = money_round(price * (1.0 - half));
    const Money ask = money_round(price * (1.0 + half));

    const std::int64_t target = p.target_inventory >= 0 ? p.target_inventory : a.shares;
    const double band = p.delta_fraction * static_cast<double>(std::max<std::int64_t>(target, 1));
    const double dev = static_cast<double>(a.shares - target);
    // Quote both sides; scale down the side that would push inventory further
    // from target, fading to zero at twice the inventory band.
    double buy_scale = dev > 0 ? std::clamp(1.0 - dev / (2.0 * band), 0.0, 1.0) : 1.0;
    double sell_scale = dev < 0 ? std::clamp(1.0 + dev / (2.0 * band), 0.0, 1.0) : 1.0;
    if (dev < 0 && price < pbar) buy_scale *= 1.5;
    if (dev > 0 && price > pbar) sell_scale *= 1.5;

    const std::int64_t buy_res = bid > 0 ? a.available_cash() / bid : 0;
    const std::int64_t sell_res = a.available_shares();
    const std::int64_t buy_qty =
        size_rule(buy_scale * p.max_fraction * static_cast<double>(buy_res), buy_res,
                  p.max_fraction);
    const std::int64_t sell_qty =
        size_rule(sell_scale * p.max_fraction * static_cast<double>(sell_res), sell_res,
                  p.max_fraction);

    TradeDecision d;
    d.valuation = money_to_double(s.last_price);
    d.price_target = money_to_double(s.last_price);
    d.valuation_reasoning = "quoting around the last price";
    d.price_target_reasoning =
        "half spread " + fmt(half * 100.0) + "% of price, proportional to volatility";
    d.reasoning = "providing liquidity: bid " + money_to_string(bid) + ", ask " +
                  money_to_string(ask) + ", spread scaled to volatility and inventory";
    d.replace_decision = ReplaceDecision::Replace;
    if (buy_qty > 0) d.orders.push_back(make_request(Side::Buy, OrderKind::Limit, buy_qty, bid));
    if (sell_qty > 0)
        d.orders.push_back(make_request(Side::Sell, OrderKind::Limit, sell_qty, ask));
    return d;
}

TradeDecision contrarian_decide(const StrategyParams& p, const MarketSnapshot& s,
                                const AgentAccount& a) {
    const double pbar = history_mean_price(s, p.ma_window);
    const double sigma = history_price_sigma(s, p.vol_window, p.sigma_floor);
    const double z = (money_to_double(s.last_price) - pbar) / sigma;
    const bool market = std::abs(z) > p.mu;
    const Money ref = money_round(pbar * 100.0);
    const std::string why = "z-score " + fmt(z) +
                            ": the market shows an excessive move away from its "
                            "average; expecting a reversal of the overreaction";
    if (z < -p.eta)
        return directional(Side::Buy, market ? OrderKind::Market : OrderKind::Limit, ref,
                           s, a, p, pbar, pbar, why);
    if (z > p.eta)
        return directional(Side::Sell, market ? OrderKind::Market : OrderKind::Limit, ref,
                           s, a, p, pbar, pbar, why);
    return hold_decision(s, "price within normal range of sentiment, z-score " + fmt(z));
}

TradeDecision news_decide(const StrategyParams& p, const MarketSnapshot& s,
                          const AgentAccount& a, const NewsSignal& news) {
    const double pbar = history_mean_price(s, p.ma_window);
    const double price = money_to_double(s.last_price);
    const double n = news.value;
    const bool market = std::abs(n) > p.nu;
    const Money ref = money_round(pbar * 100.0);
    const std::string why = "news signal " + fmt(n) + " against price " + fmt(price);
    if (n > 0 && price < pbar)
        return directional(Side::Buy, market ? OrderKind::Market : OrderKind::Limit, ref,
                           s, a, p, pbar, pbar, why);
    if (n < 0 || price > pbar + p.xi * std::abs(n))
        return directional(Side::Sell, market ? OrderKind::Market : OrderKind::Limit, ref,
                           s, a, p, pbar, pbar, why);
    return hold_decision(s, "no actionable news");
}

TradeDecision sentiment_decide(AgentType type, const StrategyParams& p,
                               const MarketSnapshot& s, const AgentAccount& a) {
    if (!s.fundamental_estimate) return hold_decision(s, "fundamental unavailable");
    double mult = p.optimism_multiplier;
    if (type == AgentType::Pessimistic && mult == 10.0) mult = 0.1;
    const double target = mult * money_to_double(*s.fundamental_estimate);
    const double price = money_to_double(s.last_price);
    if (price < target - p.kappa) {
        const std::string why =
            type == AgentType::Optimistic
                ? "price " + fmt(price) + " is far below my growth target of " +
                      fmt(target) + "; strong upside, expecting convergence upward"
                : "price " + fmt(price) + " still below my discounted target " + fmt(target);
        return directional(Side::Buy, OrderKind::Market, 0, s, a, p, target, target, why);
    }
    if (price > target + p.kappa) {
        const std::string why = "price " + fmt(price) + " exceeds my target of " +
                                fmt(target) + "; expecting convergence downward";
        return directional(Side::Sell, OrderKind::Market, 0, s, a, p, target, target, why);
    }
    return hold_decision(s, "price sits at my target of " + fmt(target));
}

TradeDecision speculator_decide(const StrategyParams& p, const MarketSnapshot& s,
                                const AgentAccount& a) {
    const double edp = last_price_change(s);  // one-lag proxy for E[dP]
    const bool market = std::abs(edp) > p.omega;
    const std::string why = "expected price change " + fmt(edp) +
                            "; trading the inefficiency while it persists";
    if (edp > p.psi)
        return directional(Side::Buy, market ? OrderKind::Market : OrderKind::Limit,
                           s.last_price, s, a, p, money_to_double(s.last_price),
                           money_to_double(s.last_price) + edp, why);
    if (edp < -p.psi)
        return directional(Side::Sell, market ? OrderKind::Market : OrderKind::Limit,
                           s.last_price, s, a, p, money_to_double(s.last_price),
                           money_to_double(s.last_price) + edp, why);
    return hold_decision(s, "no exploitable expected move");
}

TradeDecision random_decide(const StrategyParams& p, const MarketSnapshot& s,
                            const AgentAccount& a, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double pick = u(rng);
    if (pick < 0.2) return hold_decision(s, "sitting out this round");
    const Side side = pick < 0.6 ? Side::Buy : Side::Sell;
    const bool market = u(rng) < 0.5;
    const double tilt = 1.0 + (u(rng) - 0.5) * 0.04;  // +/- 2% around last price
    const Money limit = money_round(static_cast<double>(s.last_price) * tilt);
    const Money ref = market ? s.depth.best_ask.value_or(s.last_price) : limit;
    const std::int64_t resource = side_resource(side, a, s, ref);
    const std::int64_t cap = static_cast<std::int64_t>(
        std::floor(p.max_fraction * static_cast<double>(resource)));
    if (cap <= 0) return hold_decision(s, "no resources to trade");
    std::uniform_int_distribution<std::int64_t> qd(1, cap);
    const std::int64_t qty = qd(rng);
    TradeDecision d = hold_decision(s, "noise trade");
    d.replace_decision = ReplaceDecision::Replace;
    d.orders.push_back(
        make_request(side, market ? OrderKind::Market : OrderKind::Limit, qty, limit));
    return d;
}

}  // namespace

TradeDecision strategy_decide(AgentType type, const StrategyParams& params,
                              const MarketSnapshot& snapshot, const AgentAccount& account,
                              const NewsSignal& news, std::mt19937_64& rng) {
    switch (type) {
        case AgentType::Value: return value_decide(params, snapshot, account);
        case AgentType::Momentum: return momentum_decide(params, snapshot, account);
        case AgentType::MarketMaker: return maker_decide(params, snapshot, account);
        case AgentType::Contrarian: return contrarian_decide(params, snapshot, account);
        case AgentType::News: return news_decide(params, snapshot, account, news);
        case AgentType::Optimistic:
        case AgentType::Pessimistic:
            return sentiment_decide(type, params, snapshot, account);
        case AgentType::Speculator: return speculator_decide(params, snapshot, account);
        case AgentType::Random: return random_decide(params, snapshot, account, rng);
        case AgentType::AlwaysBuy:
            return directional(Side::Buy, OrderKind::Market, 0, snapshot, account, params,
                               money_to_double(snapshot.last_price),
                               money_to_double(snapshot.last_price), "always buying");
        case AgentType::AlwaysSell:
            return directional(Side::Sell, OrderKind::Market, 0, snapshot, account, params,
                               money_to_double(snapshot.last_price),
                               money_to_double(snapshot.last_price), "always selling");
        case AgentType::Hold: return hold_decision(snapshot, "holding by mandate");
        case AgentType::Llm:
            throw std::invalid_argument("llm agents do not use rule strategies");
    }
    throw std::logic_error("unhandled agent type");
}

std::vector<double> linear_state(AgentType type, const StrategyParams& params,
                                 const MarketSnapshot& snapshot,
                                 const AgentAccount& account, const NewsSignal& news) {
    const double price = money_to_double(snapshot.last_price);
    const double v = snapshot.fundamental_estimate
                         ? money_to_double(*snapshot.fundamental_estimate)
                         : 0.0;
    const double pbar = history_mean_price(snapshot, params.ma_window);
    const double sigma = history_price_sigma(snapshot, params.vol_window, params.sigma_floor);
    switch (type) {
        case AgentType::Value: return {v != 0.0 ? (v - price) / v : 0.0};
        case AgentType::Momentum:
            return {last_price_change(snapshot), last_volume_change(snapshot)};
        case AgentType::MarketMaker: {
            const std::int64_t target =
                params.target_inventory >= 0 ? params.target_inventory : account.shares;
            return {static_cast<double>(target - account.shares), price - pbar};
        }
        case AgentType::Contrarian: return {(price - pbar) / sigma};
        case AgentType::News: return {news.value, price - pbar};
        case AgentType::Optimistic:
        case AgentType::Pessimistic: {
            double mult = params.optimism_multiplier;
            if (type == AgentType::Pessimistic && mult == 10.0) mult = 0.1;
            return {mult * v - price};
        }
        case AgentType::Speculator: return {last_price_change(snapshot)};
        default: return {0.0};
    }
}

TradeDecision linear_decide(AgentType type, const StrategyParams& params,
                            const LinearCoefficients& coeffs,
                            const MarketSnapshot& snapshot, const AgentAccount& account,
                            const NewsSignal& news, std::mt19937_64& rng) {
    const auto state = linear_state(type, params, snapshot, account, news);
    double q = coeffs.beta0;
    for (std::size_t i = 0; i < state.size() && i < coeffs.betas.size(); ++i)
        q += coeffs.betas[i] * state[i];
    if (coeffs.noise_sd > 0.0) {
        std::normal_distribution<double> eps(0.0, coeffs.noise_sd);
        q += eps(rng);
    }
    const auto qty = std::llround(std::abs(q));
    if (qty == 0) return hold_decision(snapshot, "linear signal rounds to zero");

    const double p_market =
        market_order_probability(coeffs, std::abs(q), std::abs(last_price_change(snapshot)));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const bool market = u(rng) < p_market;

    TradeDecision d = hold_decision(snapshot, "linear rule signal " + fmt(q));
    d.replace_decision = ReplaceDecision::Replace;
    d.orders.push_back(make_request(q > 0 ? Side::Buy : Side::Sell,
                                    market ? OrderKind::Market : OrderKind::Limit, qty,
                                    snapshot.last_price));
    return d;
}

}  // namespace marketsim
