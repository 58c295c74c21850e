#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "marketsim/orderbook.hpp"
#include "marketsim/types.hpp"

namespace marketsim {

struct RoundResult {
    std::vector<Trade> trades;
    Money clearing_price = 0;
    std::int64_t volume = 0;
    std::vector<Order> converted_orders;  // market remainders now resting as limits
    std::vector<Order> unexecuted;        // dropped remainders (no budget left)
    std::vector<Order> cancelled;
};

/// A market order faced an empty opposite side with no reference price.
/// Signals a degenerate scenario configuration, not a runtime condition.
struct UnmatchableError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Per-round clearing. Stages, in order:
///   1. apply cancellations
///   2. net market buys against market sells at the reference price
///   3. execute remaining market orders against the book, best price first
///   4. limits in sequence order: match anything they cross at the resting
///      order's price, rest the remainder
///   5. convert unfilled market remainders to aggressive limits and insert
/// Self-matches are skipped: an order never fills against the same agent's
/// resting order. Market buys never spend more than their cash_bound.
RoundResult run_round(OrderBook& book, const std::vector<OrderId>& cancels,
                      std::vector<Order> new_orders, std::optional<Money> prev_price,
                      int round, std::int64_t& next_trade_id);

/// Last trade price; else bid/ask midpoint; else the single existing side's
/// best price; else the previous price. Total on all inputs.
Money price_formation(const std::vector<Trade>& trades, const OrderBook& book_after,
                      Money prev_price);

}  // namespace marketsim
