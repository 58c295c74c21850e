#pragma once

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "marketsim/types.hpp"

namespace marketsim {

struct DepthLevel {
    Money price = 0;
    std::int64_t shares = 0;
};

struct DepthSnapshot {
    std::vector<DepthLevel> bid_levels;  // descending price
    std::vector<DepthLevel> ask_levels;  // ascending price
    std::optional<Money> best_bid;
    std::optional<Money> best_ask;
};

enum class CancelResult { Cancelled, NotFound };

/// Persistent limit order book with strict price-time priority.
/// Only limit orders with remaining > 0 may rest here; market orders are
/// consumed (or converted) by the matching pass and never stored.
class OrderBook {
  public:
    void insert(const Order& order);
    /// Removes the order if present. Unknown ids are reported, not fatal.
    CancelResult cancel(OrderId id, Order* removed = nullptr);

    DepthSnapshot depth() const;
    std::optional<Money> best_bid() const;
    std::optional<Money> best_ask() const;

    bool contains(OrderId id) const { return index_.count(id) != 0; }
    bool empty() const { return bids_.empty() && asks_.empty(); }
    std::size_t order_count() const { return index_.size(); }
    std::int64_t total_resting_shares() const;

    /// All resting orders, best price first then FIFO, one side.
    std::vector<Order> side_orders(Side side) const;
    std::vector<Order> all_orders() const;
    std::vector<OrderId> orders_of(AgentId agent) const;

    /// Matching support: the first resting order on `side` whose agent differs
    /// from `taker` (best price first, FIFO within a level). Returns nullptr
    /// when only the taker's own orders (or nothing) rest there.
    Order* best_counterparty(Side side, AgentId taker);
    /// Applies a fill to a resting order and drops it when fully filled.
    void fill(OrderId id, std::int64_t quantity);

  private:
    using BidMap = std::map<Money, std::deque<Order>, std::greater<Money>>;
    using AskMap = std::map<Money, std::deque<Order>>;
    BidMap bids_;
    AskMap asks_;
    struct Locator {
        Side side;
        Money price;
    };
    std::unordered_map<OrderId, Locator> index_;

    template <class Map>
    static void erase_from(Map& m, Money price, OrderId id, Order* removed);
};

}  // namespace marketsim
