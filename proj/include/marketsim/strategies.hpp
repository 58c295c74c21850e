#pragma once

#include <random>
#include <string>
#include <vector>

#include "marketsim/account.hpp"
#include "marketsim/decision.hpp"

namespace marketsim {

enum class AgentType {
    Value,
    Momentum,
    MarketMaker,
    Contrarian,
    News,
    Optimistic,
    Pessimistic,
    Speculator,
    Random,
    AlwaysBuy,
    AlwaysSell,
    Hold,
    Llm,
};

const char* to_string(AgentType t);
AgentType agent_type_from_string(const std::string& s);

/// Thresholds for the rule strategies. Defaults are round numbers at the
/// scale of the bundled scenarios; everything is scenario-configurable.
struct StrategyParams {
    double alpha = 0.10;  // value: no-trade band around P/V = 1
    double beta = 0.25;   // value: market-order trigger on |P/V - 1|
    double eta = 2.0;     // contrarian: entry z-score
    double mu = 2.0;      // contrarian: market-order z-score
    double nu = 0.5;      // news: market-order trigger on |N|
    double xi = 1.0;      // news: sell-band slope on |N|
    double kappa = 0.0;            // optimistic: band around multiplier * V
    double optimism_multiplier = 10.0;  // 10x per the sentiment bias; 0.1 when pessimistic
    double psi = 0.5;    // speculator: entry threshold on E[dP]
    double omega = 0.5;  // speculator: market-order threshold
    double lambda = 1.0;          // maker: spread multiple of volatility
    double max_half_spread = 0.05;  // maker: spread cap as fraction of price
    double delta_fraction = 0.2;    // maker: inventory band as fraction of I*
    std::int64_t target_inventory = -1;  // maker I*; -1 = initial endowment
    int ma_window = 5;   // moving-average window (matches 5-round history)
    int vol_window = 5;  // volatility window
    double sigma_floor = 1e-6;
    double max_fraction = 0.025;  // per-round size cap as fraction of resources
};

/// Zero-mean linear decision rule q = b0 + sum(b_i * x_i) + eps with a probit
/// market-vs-limit choice Pr(Market) = Phi(g0 + g1|q| + g2|dP|).
struct LinearCoefficients {
    double beta0 = 0.0;
    std::vector<double> betas;
    double noise_sd = 0.0;
    double gamma0 = 0.0;
    double gamma1 = 0.0;
    double gamma2 = 0.0;
};

/// q_max = floor(max_fraction * resource_shares); clamp(round-half-up(q*), 0, q_max).
std::int64_t size_rule(double q_star, std::int64_t resource_shares, double max_fraction);

/// Standard normal CDF.
double normal_cdf(double x);

double market_order_probability(const LinearCoefficients& c, double abs_q,
                                double abs_dp);

/// The deterministic rule strategies. Same inputs always produce the same
/// decision except for the Random type, which draws from `rng`.
TradeDecision strategy_decide(AgentType type, const StrategyParams& params,
                              const MarketSnapshot& snapshot, const AgentAccount& account,
                              const NewsSignal& news, std::mt19937_64& rng);

/// State vector the linear approximations regress on, per type.
std::vector<double> linear_state(AgentType type, const StrategyParams& params,
                                 const MarketSnapshot& snapshot,
                                 const AgentAccount& account, const NewsSignal& news);

TradeDecision linear_decide(AgentType type, const StrategyParams& params,
                            const LinearCoefficients& coeffs,
                            const MarketSnapshot& snapshot, const AgentAccount& account,
                            const NewsSignal& news, std::mt19937_64& rng);

/// Moving average / population std over the snapshot's price history window.
double history_mean_price(const MarketSnapshot& snapshot, int window);
double history_price_sigma(const MarketSnapshot& snapshot, int window, double floor);

}  // namespace marketsim
