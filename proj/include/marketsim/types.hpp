#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "marketsim/money.hpp"

namespace marketsim {

using OrderId = std::int64_t;
using AgentId = int;

enum class Side { Buy, Sell };
enum class OrderKind { Market, Limit };

inline const char* to_string(Side s) { return s == Side::Buy ? "Buy" : "Sell"; }
inline const char* to_string(OrderKind k) { return k == OrderKind::Market ? "market" : "limit"; }

struct Order {
    OrderId id = 0;
    AgentId agent_id = 0;
    Side side = Side::Buy;
    OrderKind kind = OrderKind::Limit;
    std::int64_t quantity = 0;   // original size, shares
    std::int64_t remaining = 0;  // unfilled shares, <= quantity
    std::optional<Money> price_limit;  // present iff kind == Limit
    int round_submitted = 0;
    std::int64_t sequence = 0;  // global submission order, tie-break within a level
    // Cash budget for market buys; fills never cost more than this.
    // Absent means unconstrained (used by tests and the differential oracle).
    std::optional<Money> cash_bound;

    bool filled() const { return remaining == 0; }
};

enum class TradePhase { MarketToMarket, MarketToBook, LimitCross };

inline const char* to_string(TradePhase p) {
    switch (p) {
        case TradePhase::MarketToMarket: return "MarketToMarket";
        case TradePhase::MarketToBook: return "MarketToBook";
        default: return "LimitCross";
    }
}

struct Trade {
    std::int64_t trade_id = 0;
    int round = 0;
    Money price = 0;
    std::int64_t quantity = 0;
    AgentId buyer_agent = 0;
    AgentId seller_agent = 0;
    OrderId buy_order = 0;
    OrderId sell_order = 0;
    TradePhase phase = TradePhase::LimitCross;
};

}  // namespace marketsim
