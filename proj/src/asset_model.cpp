#include "marketsim/asset_model.hpp"

#include <cmath>
#include <stdexcept>

namespace marketsim {

double fundamental_value(const MarketParams& params, int t) {
    const double r = params.interest_rate;
    if (r <= 0.0) throw std::invalid_argument("interest_rate must be positive");
    const double ed = params.expected_dividend;
    if (params.horizon == HorizonKind::Infinite) return ed / r;
    const int periods = params.horizon_rounds - t + 1;
    if (periods < 0) throw std::invalid_argument("round past the finite horizon");
    double v = 0.0;
    double disc = 1.0;
    for (int tau = 1; tau <= periods; ++tau) {
        disc /= 1.0 + r;
        v += ed * disc;
    }
    v += params.redemption_value * disc;
    return v;
}

Money fundamental_value_money(const MarketParams& params, int t) {
    return money_from_double(fundamental_value(params, t));
}

double calibrated_gbm_drift(double rate, double v_star, double redemption, int horizon,
                            int t) {
    return rate * v_star - rate * redemption * std::exp(-rate * (horizon - t));
}

Money pay_dividend(const BernoulliDividend& process, std::mt19937_64& rng,
                   std::vector<AgentAccount>& accounts) {
    const Money realized = process.draw(rng);
    for (auto& a : accounts) a.dividend_cash += a.shares * realized;
    return realized;
}

void accrue_interest(double rate, std::vector<AgentAccount>& accounts) {
    for (auto& a : accounts)
        a.dividend_cash += money_round(rate * static_cast<double>(a.main_cash));
}

}  // namespace marketsim
