#include <doctest.h>

#include <algorithm>
#include <random>
#include <tuple>

#include "marketsim/matching.hpp"
#include "marketsim/rng.hpp"
#include "reference_match.hpp"

using namespace marketsim;

namespace {

Order make_order(OrderId id, AgentId agent, Side side, OrderKind kind, std::int64_t qty,
                 std::optional<Money> price, std::int64_t sequence) {
    Order o;
    o.id = id;
    o.agent_id = agent;
    o.side = side;
    o.kind = kind;
    o.quantity = o.remaining = qty;
    o.price_limit = price;
    o.sequence = sequence;
    return o;
}

Order limit(OrderId id, AgentId agent, Side side, std::int64_t qty, const char* price,
            std::int64_t sequence) {
    return make_order(id, agent, side, OrderKind::Limit, qty, money_parse(price), sequence);
}

Order market(OrderId id, AgentId agent, Side side, std::int64_t qty,
             std::int64_t sequence) {
    return make_order(id, agent, side, OrderKind::Market, qty, std::nullopt, sequence);
}

auto trade_key(const Trade& t) {
    return std::tuple(t.price, t.quantity, t.buyer_agent, t.seller_agent, t.buy_order,
                      t.sell_order, static_cast<int>(t.phase));
}

auto order_key(const Order& o) {
    return std::tuple(o.id, o.remaining, o.price_limit.value_or(-1),
                      static_cast<int>(o.side));
}

std::vector<Order> sorted_orders(std::vector<Order> orders) {
    std::sort(orders.begin(), orders.end(),
              [](const Order& a, const Order& b) { return a.id < b.id; });
    return orders;
}

}  // namespace

TEST_CASE("market buy fills a resting ask at its limit price") {
    OrderBook book;
    book.insert(limit(1, 1, Side::Sell, 100, "29.00", 1));
    std::int64_t tid = 1;
    auto r = run_round(book, {}, {market(2, 2, Side::Buy, 100, 2)}, 2800, 1, tid);
    REQUIRE(r.trades.size() == 1);
    CHECK(r.trades[0].price == money_parse("29.00"));
    CHECK(r.trades[0].quantity == 100);
    CHECK(r.trades[0].phase == TradePhase::MarketToBook);
    CHECK(r.clearing_price == money_parse("29.00"));
    CHECK(book.empty());
}

TEST_CASE("market pair nets at the reference price, remainder walks the book") {
    OrderBook book;
    std::int64_t tid = 1;
    auto r = run_round(book, {},
                       {market(1, 1, Side::Buy, 80, 1), market(2, 2, Side::Sell, 50, 2)},
                       money_parse("28.00"), 1, tid);
    REQUIRE(!r.trades.empty());
    CHECK(r.trades[0].phase == TradePhase::MarketToMarket);
    CHECK(r.trades[0].price == money_parse("28.00"));
    CHECK(r.trades[0].quantity == 50);
    // No book liquidity: the 30-share remainder converts at the reference price.
    REQUIRE(r.converted_orders.size() == 1);
    CHECK(r.converted_orders[0].remaining == 30);
    CHECK(r.converted_orders[0].price_limit == money_parse("28.00"));
}

TEST_CASE("crossing limit buy executes at the resting ask price") {
    OrderBook book;
    book.insert(limit(1, 1, Side::Sell, 100, "29.00", 1));
    std::int64_t tid = 1;
    auto r = run_round(book, {}, {limit(2, 2, Side::Buy, 60, "29.50", 2)}, 2800, 1, tid);
    REQUIRE(r.trades.size() == 1);
    CHECK(r.trades[0].price == money_parse("29.00"));
    CHECK(r.trades[0].quantity == 60);
    CHECK(r.trades[0].phase == TradePhase::LimitCross);
    const auto asks = book.side_orders(Side::Sell);
    REQUIRE(asks.size() == 1);
    CHECK(asks[0].remaining == 40);
}

TEST_CASE("market-to-market netting precedes any book interaction") {
    OrderBook book;
    book.insert(limit(1, 1, Side::Sell, 100, "29.00", 1));
    std::int64_t tid = 1;
    auto r = run_round(book, {},
                       {market(2, 2, Side::Buy, 50, 2), market(3, 3, Side::Sell, 50, 3)},
                       money_parse("28.00"), 1, tid);
    REQUIRE(r.trades.size() == 1);
    CHECK(r.trades[0].phase == TradePhase::MarketToMarket);
    CHECK(r.trades[0].price == money_parse("28.00"));
    CHECK(book.side_orders(Side::Sell)[0].remaining == 100);  // ask untouched
}

TEST_CASE("price-time priority: better price first, then earlier sequence") {
    OrderBook book;
    book.insert(limit(1, 1, Side::Sell, 10, "29.50", 1));
    book.insert(limit(2, 2, Side::Sell, 10, "29.00", 2));
    book.insert(limit(3, 3, Side::Sell, 10, "29.00", 3));
    std::int64_t tid = 1;
    auto r = run_round(book, {}, {market(4, 4, Side::Buy, 25, 4)}, 2800, 1, tid);
    REQUIRE(r.trades.size() == 3);
    CHECK(r.trades[0].sell_order == 2);
    CHECK(r.trades[1].sell_order == 3);
    CHECK(r.trades[2].sell_order == 1);
    CHECK(r.trades[2].quantity == 5);
}

TEST_CASE("no trade violates a participating limit's price bound") {
    OrderBook book;
    book.insert(limit(1, 1, Side::Sell, 100, "30.00", 1));
    std::int64_t tid = 1;
    auto r = run_round(book, {}, {limit(2, 2, Side::Buy, 50, "29.00", 2)}, 2800, 1, tid);
    CHECK(r.trades.empty());
    CHECK(book.best_bid() == money_parse("29.00"));
    CHECK(book.best_ask() == money_parse("30.00"));
}

TEST_CASE("crossed pair of new limits clears within the round") {
    OrderBook book;
    std::int64_t tid = 1;
    auto r = run_round(book, {},
                       {limit(1, 1, Side::Buy, 100, "31.00", 1),
                        limit(2, 2, Side::Sell, 60, "30.00", 2)},
                       2800, 1, tid);
    REQUIRE(r.trades.size() == 1);
    CHECK(r.trades[0].price == money_parse("31.00"));  // resting bid's price
    CHECK(r.trades[0].quantity == 60);
    CHECK(book.best_bid() == money_parse("31.00"));
    CHECK(!book.best_ask());
}

TEST_CASE("self-match is skipped, not cancelled") {
    OrderBook book;
    book.insert(limit(1, 7, Side::Sell, 100, "29.00", 1));
    book.insert(limit(2, 8, Side::Sell, 100, "29.50", 2));
    std::int64_t tid = 1;
    auto r = run_round(book, {}, {market(3, 7, Side::Buy, 50, 3)}, 2800, 1, tid);
    REQUIRE(r.trades.size() == 1);
    CHECK(r.trades[0].seller_agent == 8);
    CHECK(r.trades[0].price == money_parse("29.50"));
    CHECK(book.side_orders(Side::Sell)[0].remaining == 100);  // own ask untouched
}

TEST_CASE("unfilled market remainder converts to an aggressive limit") {
    OrderBook book;
    book.insert(limit(1, 1, Side::Sell, 30, "29.00", 1));
    book.insert(limit(2, 2, Side::Sell, 40, "29.20", 2));
    std::int64_t tid = 1;
    auto r = run_round(book, {}, {market(3, 3, Side::Buy, 100, 3)}, 2800, 1, tid);
    CHECK(r.volume == 70);
    REQUIRE(r.converted_orders.size() == 1);
    CHECK(r.converted_orders[0].kind == OrderKind::Limit);
    CHECK(r.converted_orders[0].remaining == 30);
    CHECK(r.converted_orders[0].price_limit == money_parse("28.00"));  // ref price
    for (const auto& o : book.all_orders()) CHECK(o.kind == OrderKind::Limit);
}

TEST_CASE("market order into an empty market with no reference price is unmatchable") {
    OrderBook book;
    std::int64_t tid = 1;
    CHECK_THROWS_AS(
        run_round(book, {}, {market(1, 1, Side::Buy, 10, 1)}, std::nullopt, 1, tid),
        UnmatchableError);
}

TEST_CASE("cash bound caps market-buy spending") {
    OrderBook book;
    book.insert(limit(1, 1, Side::Sell, 100, "30.00", 1));
    std::int64_t tid = 1;
    Order buy = market(2, 2, Side::Buy, 100, 2);
    buy.cash_bound = money_parse("1500.00");  // affords 50 shares at 30.00
    auto r = run_round(book, {}, {buy}, money_parse("28.00"), 1, tid);
    REQUIRE(r.trades.size() == 1);
    CHECK(r.trades[0].quantity == 50);
    // Remainder converts only up to the leftover budget (zero here).
    CHECK(r.converted_orders.empty());
    REQUIRE(r.unexecuted.size() == 1);
    CHECK(r.unexecuted[0].remaining == 50);
}

TEST_CASE("price formation: no trades, two-sided book -> midpoint") {
    OrderBook book;
    std::int64_t tid = 1;
    auto r = run_round(book, {},
                       {limit(1, 1, Side::Buy, 10, "28.00", 1),
                        limit(2, 2, Side::Sell, 10, "29.00", 2)},
                       2500, 1, tid);
    CHECK(r.trades.empty());
    CHECK(r.clearing_price == money_parse("28.50"));
}

TEST_CASE("price formation: empty book carries the previous price") {
    OrderBook book;
    std::int64_t tid = 1;
    auto r = run_round(book, {}, {}, money_parse("28.00"), 1, tid);
    CHECK(r.clearing_price == money_parse("28.00"));
    CHECK(r.trades.empty());
}

TEST_CASE("price formation: one-sided book uses that side's best price") {
    OrderBook book;
    std::int64_t tid = 1;
    auto r = run_round(book, {}, {limit(1, 1, Side::Buy, 10, "27.00", 1)}, 2800, 1, tid);
    CHECK(r.clearing_price == money_parse("27.00"));
}

TEST_CASE("cancellations apply before matching") {
    OrderBook book;
    book.insert(limit(1, 1, Side::Sell, 100, "29.00", 1));
    std::int64_t tid = 1;
    auto r = run_round(book, {1}, {market(2, 2, Side::Buy, 50, 2)},
                       money_parse("28.00"), 1, tid);
    REQUIRE(r.cancelled.size() == 1);
    CHECK(r.cancelled[0].id == 1);
    CHECK(r.trades.empty());  // liquidity was cancelled; remainder converted
    REQUIRE(r.converted_orders.size() == 1);
}

TEST_CASE("differential: run_round matches the reference oracle on 1000 instances") {
    int mismatches = 0;
    for (int instance = 0; instance < 1000; ++instance) {
        auto rng = make_rng(20260823, static_cast<std::uint64_t>(instance));
        std::uniform_int_distribution<int> count_d(0, 8);
        std::uniform_int_distribution<Money> price_d(100, 10'000);  // 1.00 .. 100.00
        std::uniform_int_distribution<std::int64_t> qty_d(1, 500);
        std::uniform_int_distribution<int> agent_d(0, 4);
        std::uniform_real_distribution<double> u(0.0, 1.0);

        OrderBook fast;
        testing::ReferenceBook ref;
        OrderId next_id = 1;
        std::int64_t seq = 1;
        std::vector<OrderId> resting_ids;
        const int resting_n = count_d(rng);
        for (int i = 0; i < resting_n; ++i) {
            Order o = make_order(next_id++, agent_d(rng),
                                 u(rng) < 0.5 ? Side::Buy : Side::Sell, OrderKind::Limit,
                                 qty_d(rng), price_d(rng), seq++);
            fast.insert(o);
            ref.insert(o);
            resting_ids.push_back(o.id);
        }

        std::vector<OrderId> cancels;
        for (OrderId id : resting_ids)
            if (u(rng) < 0.2) cancels.push_back(id);
        if (u(rng) < 0.1) cancels.push_back(999'000 + instance);  // unknown id

        std::vector<Order> new_orders;
        const int new_n = count_d(rng);
        for (int i = 0; i < new_n && resting_n + i < 16; ++i) {
            const Side side = u(rng) < 0.5 ? Side::Buy : Side::Sell;
            if (u(rng) < 0.4) {
                Order o = make_order(next_id++, agent_d(rng), side, OrderKind::Market,
                                     qty_d(rng), std::nullopt, seq++);
                if (side == Side::Buy && u(rng) < 0.5)
                    o.cash_bound = static_cast<Money>(qty_d(rng)) * price_d(rng);
                new_orders.push_back(o);
            } else {
                new_orders.push_back(make_order(next_id++, agent_d(rng), side,
                                                OrderKind::Limit, qty_d(rng),
                                                price_d(rng), seq++));
            }
        }
        const std::optional<Money> prev =
            u(rng) < 0.9 ? std::optional<Money>(price_d(rng)) : std::nullopt;

        std::int64_t tid_a = 1, tid_b = 1;
        RoundResult a, b;
        bool threw_a = false, threw_b = false;
        try {
            a = run_round(fast, cancels, new_orders, prev, 1, tid_a);
        } catch (const UnmatchableError&) {
            threw_a = true;
        }
        try {
            b = testing::reference_match(ref, cancels, new_orders, prev, 1, tid_b);
        } catch (const UnmatchableError&) {
            threw_b = true;
        }

        bool ok = threw_a == threw_b;
        if (ok && !threw_a) {
            ok = a.trades.size() == b.trades.size() && a.volume == b.volume &&
                 a.clearing_price == b.clearing_price;
            for (std::size_t i = 0; ok && i < a.trades.size(); ++i)
                ok = trade_key(a.trades[i]) == trade_key(b.trades[i]);
            const auto fa = sorted_orders(fast.all_orders());
            const auto fb = sorted_orders(ref.orders);
            ok = ok && fa.size() == fb.size();
            for (std::size_t i = 0; ok && i < fa.size(); ++i)
                ok = order_key(fa[i]) == order_key(fb[i]);
            ok = ok && a.converted_orders.size() == b.converted_orders.size() &&
                 a.unexecuted.size() == b.unexecuted.size() &&
                 a.cancelled.size() == b.cancelled.size();
        }
        if (!ok) {
            ++mismatches;
            CAPTURE(instance);
            CHECK(ok);
        }
    }
    CHECK(mismatches == 0);
}

TEST_CASE("fill conservation: buy volume equals sell volume per round") {
    for (int instance = 0; instance < 50; ++instance) {
        auto rng = make_rng(7, static_cast<std::uint64_t>(instance));
        std::uniform_int_distribution<Money> price_d(2700, 2900);
        std::uniform_int_distribution<std::int64_t> qty_d(1, 200);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        OrderBook book;
        std::vector<Order> orders;
        OrderId id = 1;
        for (int i = 0; i < 10; ++i) {
            const Side side = u(rng) < 0.5 ? Side::Buy : Side::Sell;
            if (u(rng) < 0.3)
                orders.push_back(make_order(id, i, side, OrderKind::Market, qty_d(rng),
                                            std::nullopt, id));
            else
                orders.push_back(make_order(id, i, side, OrderKind::Limit, qty_d(rng),
                                            price_d(rng), id));
            ++id;
        }
        std::int64_t tid = 1;
        auto r = run_round(book, {}, orders, 2800, 1, tid);
        std::int64_t total = 0;
        for (const auto& t : r.trades) {
            CHECK(t.quantity > 0);
            CHECK(t.buyer_agent != t.seller_agent);
            total += t.quantity;
        }
        CHECK(total == r.volume);
        // Resting book never crossed between distinct agents after the round.
        const auto bb = book.best_bid();
        const auto ba = book.best_ask();
        if (bb && ba && r.converted_orders.empty()) CHECK(*bb < *ba);
    }
}
