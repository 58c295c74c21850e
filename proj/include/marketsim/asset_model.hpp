#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "marketsim/account.hpp"
#include "marketsim/money.hpp"

namespace marketsim {

/// Two-point dividend: every payment_interval rounds a payment of
/// base - variation or base + variation is drawn, high with probability_high.
struct BernoulliDividend {
    Money base = 140;        // per share per payment
    Money variation = 100;   // +/- around base
    double probability_high = 0.5;
    int payment_interval = 1;

    Money expected() const { return base; }
    Money draw(std::mt19937_64& rng) const {
        std::bernoulli_distribution high(probability_high);
        return high(rng) ? base + variation : base - variation;
    }
};

/// Arithmetic random-walk dividend level, Euler step at one round per step:
/// D_{t+1} = D_t + drift + volatility * z. With volatility 0 the path is
/// deterministic and linear in t.
struct GbmDividend {
    double level = 1.40;
    double drift = 0.0;
    double volatility = 0.0;

    void step(std::mt19937_64& rng) {
        std::normal_distribution<double> z(0.0, 1.0);
        level += drift + (volatility > 0.0 ? volatility * z(rng) : 0.0);
    }
};

enum class HorizonKind { Finite, Infinite };

struct MarketParams {
    double interest_rate = 0.05;  // per round, > 0
    HorizonKind horizon = HorizonKind::Infinite;
    int horizon_rounds = 0;       // T, finite only
    double redemption_value = 0;  // K, finite only
    double expected_dividend = 1.40;
};

/// Present value of the remaining dividend stream at round t (1-based).
/// Infinite horizon: E[D]/r. Finite: sum of E[D]/(1+r)^tau for
/// tau = 1..T-t+1 plus K/(1+r)^(T-t+1).
double fundamental_value(const MarketParams& params, int t);
Money fundamental_value_money(const MarketParams& params, int t);

/// Drift that keeps the fundamental constant at V* under a finite horizon:
/// mu_t = r V* - r K e^{-r (T - t)}.
double calibrated_gbm_drift(double rate, double v_star, double redemption, int horizon,
                            int t);

/// Credits shares * realized dividend to each account's dividend cash.
/// Main cash is untouched; returns the realized per-share dividend.
Money pay_dividend(const BernoulliDividend& process, std::mt19937_64& rng,
                   std::vector<AgentAccount>& accounts);

/// Simple per-round interest on tradeable cash, credited to the
/// non-tradeable dividend account (so it never compounds into main cash).
void accrue_interest(double rate, std::vector<AgentAccount>& accounts);

}  // namespace marketsim
