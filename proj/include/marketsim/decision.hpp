#pragma once

#include <optional>
#include <string>
#include <vector>

#include "marketsim/money.hpp"
#include "marketsim/orderbook.hpp"
#include "marketsim/types.hpp"

namespace marketsim {

enum class ReplaceDecision { Add, Cancel, Replace };

inline const char* to_string(ReplaceDecision r) {
    switch (r) {
        case ReplaceDecision::Add: return "Add";
        case ReplaceDecision::Cancel: return "Cancel";
        default: return "Replace";
    }
}

struct OrderRequest {
    Side side = Side::Buy;
    std::int64_t quantity = 0;
    OrderKind kind = OrderKind::Limit;
    std::optional<Money> price_limit;  // required iff kind == Limit
};

/// Structured agent output. Cancel implies an empty order list.
struct TradeDecision {
    std::string valuation_reasoning;
    double valuation = 0.0;
    std::string price_target_reasoning;
    double price_target = 0.0;
    std::vector<OrderRequest> orders;
    ReplaceDecision replace_decision = ReplaceDecision::Add;
    std::string reasoning;
};

struct PriceHistoryEntry {
    int round = 0;
    Money price = 0;
    std::int64_t volume = 0;
};

struct DividendInfo {
    std::optional<Money> last_paid;
    Money expected = 0;
    Money base = 0;
    Money variation = 0;
    double probability_high = 0.5;
    int next_payment_in = 1;
};

/// Immutable per-round market view handed to every agent.
struct MarketSnapshot {
    Money last_price = 0;
    int round = 0;
    std::optional<int> total_rounds;            // absent = infinite horizon
    std::optional<Money> fundamental_estimate;  // hideable per scenario
    std::int64_t last_volume = 0;
    DepthSnapshot depth;
    std::vector<PriceHistoryEntry> price_history;  // most recent first, up to 5
    DividendInfo dividend;
    double interest_rate = 0.0;
    std::optional<double> pf_ratio;  // present iff fundamental_estimate present
};

struct NewsSignal {
    double value = 0.0;
};

struct OrderRejection {
    OrderRequest request;
    std::string reason;
};

}  // namespace marketsim
