#include "marketsim/orderbook.hpp"

#include <stdexcept>

namespace marketsim {

void OrderBook::insert(const Order& order) {
    if (order.kind != OrderKind::Limit)
        throw std::invalid_argument("market orders never rest in the book");
    if (order.remaining <= 0)
        throw std::invalid_argument("cannot insert an order with remaining <= 0");
    if (!order.price_limit)
        throw std::invalid_argument("limit order without a price");
    if (index_.count(order.id))
        throw std::invalid_argument("duplicate order id");
    const Money px = *order.price_limit;
    if (order.side == Side::Buy)
        bids_[px].push_back(order);
    else
        asks_[px].push_back(order);
    index_[order.id] = {order.side, px};
}

template <class Map>
void OrderBook::erase_from(Map& m, Money price, OrderId id, Order* removed) {
    auto it = m.find(price);
    for (auto q = it->second.begin(); q != it->second.end(); ++q) {
        if (q->id == id) {
            if (removed) *removed = *q;
            it->second.erase(q);
            break;
        }
    }
    if (it->second.empty()) m.erase(it);
}

CancelResult OrderBook::cancel(OrderId id, Order* removed) {
    auto it = index_.find(id);
    if (it == index_.end()) return CancelResult::NotFound;
    if (it->second.side == Side::Buy)
        erase_from(bids_, it->second.price, id, removed);
    else
        erase_from(asks_, it->second.price, id, removed);
    index_.erase(it);
    return CancelResult::Cancelled;
}

DepthSnapshot OrderBook::depth() const {
    DepthSnapshot d;
    for (const auto& [px, q] : bids_) {
        std::int64_t total = 0;
        for (const auto& o : q) total += o.remaining;
        d.bid_levels.push_back({px, total});
    }
    for (const auto& [px, q] : asks_) {
        std::int64_t total = 0;
        for (const auto& o : q) total += o.remaining;
        d.ask_levels.push_back({px, total});
    }
    d.best_bid = best_bid();
    d.best_ask = best_ask();
    return d;
}

std::optional<Money> OrderBook::best_bid() const {
    if (bids_.empty()) return std::nullopt;
    return bids_.begin()->first;
}

std::optional<Money> OrderBook::best_ask() const {
    if (asks_.empty()) return std::nullopt;
    return asks_.begin()->first;
}

std::int64_t OrderBook::total_resting_shares() const {
    std::int64_t total = 0;
    for (const auto& [px, q] : bids_)
        for (const auto& o : q) total += o.remaining;
    for (const auto& [px, q] : asks_)
        for (const auto& o : q) total += o.remaining;
    return total;
}

std::vector<Order> OrderBook::side_orders(Side side) const {
    std::vector<Order> out;
    if (side == Side::Buy) {
        for (const auto& [px, q] : bids_) out.insert(out.end(), q.begin(), q.end());
    } else {
        for (const auto& [px, q] : asks_) out.insert(out.end(), q.begin(), q.end());
    }
    return out;
}

std::vector<Order> OrderBook::all_orders() const {
    auto out = side_orders(Side::Buy);
    auto asks = side_orders(Side::Sell);
    out.insert(out.end(), asks.begin(), asks.end());
    return out;
}

std::vector<OrderId> OrderBook::orders_of(AgentId agent) const {
    std::vector<OrderId> ids;
    for (const auto& o : all_orders())
        if (o.agent_id == agent) ids.push_back(o.id);
    return ids;
}

Order* OrderBook::best_counterparty(Side side, AgentId taker) {
    if (side == Side::Buy) {
        for (auto& [px, q] : bids_)
            for (auto& o : q)
                if (o.agent_id != taker) return &o;
    } else {
        for (auto& [px, q] : asks_)
            for (auto& o : q)
                if (o.agent_id != taker) return &o;
    }
    return nullptr;
}

void OrderBook::fill(OrderId id, std::int64_t quantity) {
    auto it = index_.find(id);
    if (it == index_.end()) throw std::logic_error("fill on unknown order");
    auto apply = [&](auto& m) {
        auto lvl = m.find(it->second.price);
        for (auto q = lvl->second.begin(); q != lvl->second.end(); ++q) {
            if (q->id == id) {
                if (quantity <= 0 || quantity > q->remaining)
                    throw std::logic_error("bad fill quantity");
                q->remaining -= quantity;
                if (q->remaining == 0) {
                    lvl->second.erase(q);
                    if (lvl->second.empty()) m.erase(lvl);
                    index_.erase(id);
                }
                return;
            }
        }
        throw std::logic_error("order missing from its level");
    };
    if (it->second.side == Side::Buy)
        apply(bids_);
    else
        apply(asks_);
}

}  // namespace marketsim
