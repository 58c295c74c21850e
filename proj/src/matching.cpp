#include "marketsim/matching.hpp"

#include <algorithm>

namespace marketsim {

namespace {

// Shares a market buy can still afford at `price` within its cash bound.
std::int64_t affordable(const Order& o, std::optional<Money> budget_left, Money price) {
    if (o.side == Side::Sell || !budget_left) return o.remaining;
    if (price <= 0) return o.remaining;
    return std::min<std::int64_t>(o.remaining, *budget_left / price);
}

}  // namespace

RoundResult run_round(OrderBook& book, const std::vector<OrderId>& cancels,
                      std::vector<Order> new_orders, std::optional<Money> prev_price,
                      int round, std::int64_t& next_trade_id) {
    RoundResult result;

    // Stage 1: cancellations.
    for (OrderId id : cancels) {
        Order removed;
        if (book.cancel(id, &removed) == CancelResult::Cancelled)
            result.cancelled.push_back(removed);
    }

    std::stable_sort(new_orders.begin(), new_orders.end(),
                     [](const Order& a, const Order& b) { return a.sequence < b.sequence; });

    std::vector<Order*> market_orders;
    std::vector<Order*> limit_orders;
    for (auto& o : new_orders) {
        if (o.remaining <= 0) continue;
        if (o.kind == OrderKind::Market)
            market_orders.push_back(&o);
        else
            limit_orders.push_back(&o);
    }
    // Remaining cash budget per market buy, spent as fills accrue.
    std::vector<std::optional<Money>> budget(new_orders.size());
    auto budget_of = [&](Order* o) -> std::optional<Money>& {
        return budget[static_cast<std::size_t>(o - new_orders.data())];
    };
    for (Order* o : market_orders) budget_of(o) = o->cash_bound;

    auto record_trade = [&](Order& buy, Order& sell, Money price, std::int64_t qty,
                            TradePhase phase) {
        Trade t;
        t.trade_id = next_trade_id++;
        t.round = round;
        t.price = price;
        t.quantity = qty;
        t.buyer_agent = buy.agent_id;
        t.seller_agent = sell.agent_id;
        t.buy_order = buy.id;
        t.sell_order = sell.id;
        t.phase = phase;
        result.trades.push_back(t);
        result.volume += qty;
    };

    // Stage 2: market-to-market netting at the reference price, FIFO pairing.
    if (prev_price) {
        const Money ref = *prev_price;
        std::vector<Order*> mbuys, msells;
        for (Order* o : market_orders)
            (o->side == Side::Buy ? mbuys : msells).push_back(o);
        for (Order* b : mbuys) {
            for (Order* s : msells) {
                if (b->remaining == 0) break;
                if (s->remaining == 0 || s->agent_id == b->agent_id) continue;
                std::int64_t qty = std::min(b->remaining, s->remaining);
                qty = std::min(qty, affordable(*b, budget_of(b), ref));
                if (qty == 0) break;  // cash bound exhausted at the reference price
                b->remaining -= qty;
                s->remaining -= qty;
                if (budget_of(b)) *budget_of(b) -= qty * ref;
                record_trade(*b, *s, ref, qty, TradePhase::MarketToMarket);
            }
        }
    }

    // Stage 3: market-to-book at resting limit prices, best price first.
    for (Order* o : market_orders) {
        const Side opposite = o->side == Side::Buy ? Side::Sell : Side::Buy;
        while (o->remaining > 0) {
            Order* cp = book.best_counterparty(opposite, o->agent_id);
            if (!cp) break;
            const Money price = *cp->price_limit;
            std::int64_t qty = std::min(o->remaining, cp->remaining);
            qty = std::min(qty, affordable(*o, budget_of(o), price));
            if (qty == 0) break;
            o->remaining -= qty;
            if (budget_of(o)) *budget_of(o) -= qty * price;
            if (o->side == Side::Buy)
                record_trade(*o, *cp, price, qty, TradePhase::MarketToBook);
            else
                record_trade(*cp, *o, price, qty, TradePhase::MarketToBook);
            book.fill(cp->id, qty);
        }
    }

    // Stage 4: limits in submission-sequence order. Each order first matches
    // whatever it crosses at the resting order's price, then rests; a crossed
    // book never survives the round (self-crossed books aside, which
    // self-match prevention cannot clear).
    for (Order* o : limit_orders) {
        const Side opposite = o->side == Side::Buy ? Side::Sell : Side::Buy;
        while (o->remaining > 0) {
            Order* cp = book.best_counterparty(opposite, o->agent_id);
            if (!cp) break;
            const Money price = *cp->price_limit;
            if (o->side == Side::Buy ? price > *o->price_limit : price < *o->price_limit)
                break;
            const std::int64_t qty = std::min(o->remaining, cp->remaining);
            o->remaining -= qty;
            if (o->side == Side::Buy)
                record_trade(*o, *cp, price, qty, TradePhase::LimitCross);
            else
                record_trade(*cp, *o, price, qty, TradePhase::LimitCross);
            book.fill(cp->id, qty);
        }
        if (o->remaining > 0) book.insert(*o);
    }

    // Stage 5: convert unfilled market remainders to aggressive limits.
    for (Order* o : market_orders) {
        if (o->remaining == 0) continue;
        std::optional<Money> conv;
        if (o->side == Side::Buy)
            conv = book.best_ask() ? book.best_ask() : prev_price;
        else
            conv = book.best_bid() ? book.best_bid() : prev_price;
        if (!conv)
            throw UnmatchableError("market order " + std::to_string(o->id) +
                                   " has no opposite liquidity and no reference price");
        std::int64_t qty = affordable(*o, budget_of(o), *conv);
        if (qty < o->remaining) {
            Order dropped = *o;
            dropped.remaining -= qty;
            result.unexecuted.push_back(dropped);
        }
        if (qty > 0) {
            Order conv_order = *o;
            conv_order.kind = OrderKind::Limit;
            conv_order.price_limit = conv;
            conv_order.remaining = qty;
            conv_order.cash_bound.reset();
            book.insert(conv_order);
            result.converted_orders.push_back(conv_order);
        }
    }

    result.clearing_price = price_formation(result.trades, book, prev_price.value_or(0));
    return result;
}

Money price_formation(const std::vector<Trade>& trades, const OrderBook& book_after,
                      Money prev_price) {
    if (!trades.empty()) return trades.back().price;
    const auto bb = book_after.best_bid();
    const auto ba = book_after.best_ask();
    if (bb && ba) return money_round((static_cast<double>(*bb) + static_cast<double>(*ba)) / 2.0);
    if (bb) return *bb;
    if (ba) return *ba;
    return prev_price;
}

}  // namespace marketsim
