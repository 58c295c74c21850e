#include <doctest.h>

#include <map>
#include <numeric>

#include "marketsim/simulator.hpp"

using namespace marketsim;

namespace {

Scenario base_scenario(int rounds = 10) {
    Scenario s;
    s.name = "test";
    s.rounds = rounds;
    s.horizon = HorizonKind::Infinite;
    s.initial_price = money_parse("28.00");
    s.seed = 42;
    return s;
}

AgentConfig agent_of(AgentType type) {
    AgentConfig c;
    c.type = type;
    return c;
}

Money total_main_cash(const std::vector<AgentAccount>& accounts) {
    return std::accumulate(accounts.begin(), accounts.end(), Money{0},
                           [](Money s, const AgentAccount& a) { return s + a.main_cash; });
}

std::int64_t total_shares(const std::vector<AgentAccount>& accounts) {
    return std::accumulate(
        accounts.begin(), accounts.end(), std::int64_t{0},
        [](std::int64_t s, const AgentAccount& a) { return s + a.shares; });
}

const char* kValidSellPayload =
    R"({"valuation_reasoning":"perpetuity","valuation":28.0,
        "price_target_reasoning":"stable","price_target":29.0,
        "orders":[{"decision":"Sell","quantity":1000,"order_type":"limit",
                   "price_limit":29.50}],
        "replace_decision":"Add","reasoning":"slightly above fundamental"})";

}  // namespace

TEST_CASE("seeded_shuffle is reproducible and varies by round") {
    std::vector<AgentId> ids = {0, 1, 2, 3, 4, 5, 6, 7};
    const auto a = seeded_shuffle(ids, 42, 3);
    const auto b = seeded_shuffle(ids, 42, 3);
    CHECK(a == b);
    CHECK(seeded_shuffle(ids, 42, 4) != a);   // overwhelmingly likely by design
    CHECK(seeded_shuffle(ids, 43, 3) != a);
    CHECK(seeded_shuffle({7}, 42, 3) == std::vector<AgentId>{7});
    auto sorted = a;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == ids);
}

TEST_CASE("seeded_shuffle permutations are uniform (chi-squared, 3 agents)") {
    std::map<std::vector<AgentId>, int> counts;
    const int trials = 6000;
    for (int r = 1; r <= trials; ++r) counts[seeded_shuffle({0, 1, 2}, 42, r)]++;
    REQUIRE(counts.size() == 6);
    double chi2 = 0.0;
    const double expected = trials / 6.0;
    for (const auto& [perm, c] : counts) {
        const double d = c - expected;
        chi2 += d * d / expected;
    }
    CHECK(chi2 < 15.09);  // df = 5, p = 0.01 critical value
}

TEST_CASE("the same scenario and seed reproduce every record exactly") {
    auto s = base_scenario(20);
    s.agents = {agent_of(AgentType::Value),    agent_of(AgentType::Value),
                agent_of(AgentType::Momentum), agent_of(AgentType::MarketMaker),
                agent_of(AgentType::Random),   agent_of(AgentType::Speculator)};
    const auto r1 = run(s);
    const auto r2 = run(s);
    REQUIRE(r1.records.size() == r2.records.size());
    for (std::size_t i = 0; i < r1.records.size(); ++i) {
        const auto& a = r1.records[i];
        const auto& b = r2.records[i];
        CHECK(a.clearing_price == b.clearing_price);
        CHECK(a.volume == b.volume);
        CHECK(a.trade_count == b.trade_count);
        CHECK(a.best_bid == b.best_bid);
        CHECK(a.best_ask == b.best_ask);
        CHECK(a.dividend_paid == b.dividend_paid);
        REQUIRE(a.accounts.size() == b.accounts.size());
        for (std::size_t j = 0; j < a.accounts.size(); ++j) {
            CHECK(a.accounts[j].main_cash == b.accounts[j].main_cash);
            CHECK(a.accounts[j].shares == b.accounts[j].shares);
            CHECK(a.accounts[j].dividend_cash == b.accounts[j].dividend_cash);
        }
        REQUIRE(a.trades.size() == b.trades.size());
        for (std::size_t j = 0; j < a.trades.size(); ++j) {
            CHECK(a.trades[j].price == b.trades[j].price);
            CHECK(a.trades[j].quantity == b.trades[j].quantity);
            CHECK(a.trades[j].buyer_agent == b.trades[j].buyer_agent);
            CHECK(a.trades[j].seller_agent == b.trades[j].seller_agent);
        }
    }
    // A different seed takes a different path.
    auto s2 = s;
    s2.seed = 43;
    const auto r3 = run(s2);
    bool any_difference = false;
    for (std::size_t i = 0; i < r1.records.size(); ++i)
        if (r1.records[i].volume != r3.records[i].volume ||
            r1.records[i].clearing_price != r3.records[i].clearing_price)
            any_difference = true;
    CHECK(any_difference);
}

TEST_CASE("opposing market orders net at the previous clearing price") {
    auto s = base_scenario(1);
    s.agents = {agent_of(AgentType::AlwaysBuy), agent_of(AgentType::AlwaysSell)};
    const auto result = run(s);
    const auto& rec = result.records[0];
    CHECK(rec.clearing_price == money_parse("28.00"));
    CHECK(rec.volume == 250);  // the seller's 2.5% cap binds
    REQUIRE(!rec.trades.empty());
    for (const auto& t : rec.trades) {
        CHECK(t.price == money_parse("28.00"));
        CHECK(t.buyer_agent == 0);
        CHECK(t.seller_agent == 1);
        CHECK(t.phase == TradePhase::MarketToMarket);
    }
    CHECK(rec.accounts[0].shares == 10'250);
    CHECK(rec.accounts[1].shares == 9'750);
    CHECK(rec.accounts[0].main_cash ==
          money_parse("1000000.00") - 250 * money_parse("28.00"));
    CHECK(rec.accounts[1].main_cash ==
          money_parse("1000000.00") + 250 * money_parse("28.00"));
}

TEST_CASE("a round with no orders carries the previous price at zero volume") {
    auto s = base_scenario(5);
    s.agents = {agent_of(AgentType::Hold), agent_of(AgentType::Hold)};
    const auto result = run(s);
    for (const auto& rec : result.records) {
        CHECK(rec.clearing_price == money_parse("28.00"));
        CHECK(rec.volume == 0);
        CHECK(rec.trade_count == 0);
        CHECK(!rec.best_bid);
        CHECK(!rec.best_ask);
    }
}

TEST_CASE("finite horizon redeems all shares at K after the terminal round") {
    auto s = base_scenario(3);
    s.horizon = HorizonKind::Finite;
    s.redemption_value = 28.0;
    s.agents = {agent_of(AgentType::Hold), agent_of(AgentType::Hold)};
    const auto result = run(s);
    const auto& last = result.records.back().accounts;
    for (const auto& a : last) {
        CHECK(a.shares == 0);
        CHECK(a.committed_shares == 0);
        CHECK(a.main_cash == money_parse("1280000.00"));  // 1,000,000 + 10,000 x 28
        CHECK(a.dividend_cash > 0);  // dividends and interest landed separately
    }
    CHECK(result.records[0].accounts[0].shares == 10'000);  // untouched before the end
}

TEST_CASE("hidden fundamental forces value agents to hold") {
    auto s = base_scenario(3);
    s.hide_fundamental = true;
    s.agents = {agent_of(AgentType::Value), agent_of(AgentType::Value)};
    const auto result = run(s);
    for (const auto& rec : result.records) {
        CHECK(rec.volume == 0);
        for (const auto& d : rec.decisions)
            CHECK(d.decision.reasoning == "fundamental unavailable");
    }
}

TEST_CASE("50 rounds of random agents conserve cash and shares exactly") {
    auto s = base_scenario(50);
    for (int i = 0; i < 6; ++i) s.agents.push_back(agent_of(AgentType::Random));
    const auto result = run(s);  // throws SimulationInvariantError on violation
    const Money cash0 = total_main_cash(result.initial_accounts);
    const std::int64_t shares0 = total_shares(result.initial_accounts);
    std::int64_t traded = 0;
    for (const auto& rec : result.records) {
        CHECK(total_main_cash(rec.accounts) == cash0);
        CHECK(total_shares(rec.accounts) == shares0);
        for (const auto& a : rec.accounts) {
            CHECK(a.available_cash() >= 0);
            CHECK(a.available_shares() >= 0);
        }
        traded += rec.volume;
    }
    CHECK(traded > 0);  // the property is vacuous if nothing ever trades
}

TEST_CASE("a replace decision cancels the agent's resting orders first") {
    auto s = base_scenario(3);
    s.agents = {agent_of(AgentType::MarketMaker)};
    const auto result = run(s);
    // Round 1 places two quotes; they cannot fill (no counterparty), so round 2
    // must start by cancelling both before re-quoting.
    int placed_r1 = 0, cancelled_r2 = 0, placed_r2 = 0;
    for (const auto& e : result.records[0].order_events)
        if (e.event == "placed") ++placed_r1;
    for (const auto& e : result.records[1].order_events) {
        if (e.event == "cancelled") ++cancelled_r2;
        if (e.event == "placed") ++placed_r2;
    }
    CHECK(placed_r1 == 2);
    CHECK(cancelled_r2 == 2);
    CHECK(placed_r2 == 2);
    // Commitments always mirror exactly the two live quotes.
    const auto& a = result.records[2].accounts[0];
    CHECK(a.committed_shares > 0);
    CHECK(a.committed_cash > 0);
}

TEST_CASE("scripted llm agent trades its queued payload") {
    auto s = base_scenario(1);
    AgentConfig llm;
    llm.type = AgentType::Llm;
    llm.llm_type = "speculator";
    llm.scripted_payloads = {kValidSellPayload};
    s.agents = {llm, agent_of(AgentType::Hold)};
    const auto result = run(s);
    const auto& rec = result.records[0];
    const auto& drec = rec.decisions[0];
    CHECK(!drec.prompt_hash.empty());
    CHECK(drec.raw_payload.find("perpetuity") != std::string::npos);
    REQUIRE(drec.decision.orders.size() == 1);
    CHECK(drec.decision.orders[0].side == Side::Sell);
    CHECK(drec.signed_decision == -1);
    // The sell rests in the book at 29.50.
    CHECK(rec.best_ask == money_parse("29.50"));
    CHECK(rec.accounts[0].committed_shares == 1000);
}

TEST_CASE("malformed payloads retry and fall back to hold with an anomaly") {
    auto s = base_scenario(2);
    AgentConfig llm;
    llm.type = AgentType::Llm;
    llm.llm_type = "speculator";
    // Round 1: malformed then valid (parse retry succeeds on attempt 2).
    // Round 2: a single malformed payload; the retry exhausts the script,
    // which counts as model noise, not a configuration error.
    llm.scripted_payloads = {"not json at all", kValidSellPayload, "{broken"};
    s.agents = {llm};
    const auto result = run(s);

    const auto& r1 = result.records[0];
    CHECK(r1.decisions[0].decision.orders.size() == 1);
    REQUIRE(r1.anomalies.size() == 1);
    CHECK(r1.anomalies[0].find("parse attempt 1") != std::string::npos);

    const auto& r2 = result.records[1];
    CHECK(r2.decisions[0].decision.orders.empty());  // hold fallback
    CHECK(r2.anomalies.size() == 2);  // parse failure + script exhausted
    CHECK(r2.volume == 0);
}

TEST_CASE("an empty scripted queue on the first attempt is a configuration error") {
    auto s = base_scenario(1);
    AgentConfig llm;
    llm.type = AgentType::Llm;
    llm.llm_type = "speculator";
    s.agents = {llm};
    CHECK_THROWS_AS(run(s), ScriptError);
}

TEST_CASE("decision records capture rejections and validation outcome") {
    auto s = base_scenario(1);
    AgentConfig llm;
    llm.type = AgentType::Llm;
    llm.llm_type = "speculator";
    // Sells more shares than the endowment: clipped, recorded as accepted with
    // no rejection; a second order with nothing left is rejected.
    llm.scripted_payloads = {
        R"({"valuation_reasoning":"v","valuation":28,"price_target":29,
            "orders":[{"decision":"Sell","quantity":20000,"order_type":"limit",
                       "price_limit":29.00},
                      {"decision":"Sell","quantity":5,"order_type":"limit",
                       "price_limit":30.00}],
            "replace_decision":"Add","reasoning":"r"})"};
    s.agents = {llm};
    const auto result = run(s);
    const auto& drec = result.records[0].decisions[0];
    CHECK(drec.validation_outcome == "partial");
    REQUIRE(drec.rejections.size() == 1);
    CHECK(drec.rejections[0].reason == "insufficient shares");
    CHECK(result.records[0].accounts[0].committed_shares == 10'000);
}
