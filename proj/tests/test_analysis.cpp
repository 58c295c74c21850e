#include <doctest.h>

#include <cmath>
#include <random>

#include "marketsim/analysis.hpp"
#include "marketsim/rng.hpp"

using namespace marketsim;

namespace {

// Minimal hand-built result: `signs[a][r]` is agent a's signed decision in
// round r; all agents share one reasoning text per (agent, round) via `text`.
SimulationResult synthetic_result(const std::vector<std::string>& types,
                                  const std::vector<std::vector<int>>& signs,
                                  const std::string& text = "same text") {
    SimulationResult result;
    result.initial_price = money_parse("28.00");
    const int n = static_cast<int>(types.size());
    const int rounds = static_cast<int>(signs[0].size());
    for (int i = 0; i < n; ++i) {
        AgentMeta meta;
        meta.agent_id = i;
        meta.type = agent_type_from_string(types[static_cast<std::size_t>(i)]);
        result.agents.push_back(meta);
        AgentAccount a;
        a.agent_id = i;
        a.main_cash = money_parse("1000000.00");
        a.shares = 10'000;
        result.initial_accounts.push_back(a);
    }
    for (int r = 1; r <= rounds; ++r) {
        RoundRecord rec;
        rec.round = r;
        rec.clearing_price = money_parse("28.00");
        rec.fundamental_value = 28.0;
        for (int i = 0; i < n; ++i) {
            DecisionRecord d;
            d.agent_id = i;
            d.signed_decision = signs[static_cast<std::size_t>(i)][static_cast<std::size_t>(r - 1)];
            d.decision.reasoning = text;
            if (d.signed_decision != 0) {
                OrderRequest o;
                o.side = d.signed_decision > 0 ? Side::Buy : Side::Sell;
                o.quantity = 100;
                o.kind = OrderKind::Market;
                d.decision.orders.push_back(o);
            }
            rec.decisions.push_back(d);
        }
        rec.accounts = result.initial_accounts;
        result.records.push_back(rec);
    }
    return result;
}

}  // namespace

TEST_CASE("ols recovers planted coefficients exactly on noiseless data") {
    const std::vector<double> planted = {2.0, -1.5, 0.75};
    auto rng = make_rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<std::vector<double>> X;
    std::vector<double> y;
    for (int i = 0; i < 50; ++i) {
        const double x1 = u(rng), x2 = u(rng);
        X.push_back({1.0, x1, x2});
        y.push_back(planted[0] + planted[1] * x1 + planted[2] * x2);
    }
    const auto fit = ols(X, y);
    REQUIRE(fit.beta.size() == 3);
    for (int j = 0; j < 3; ++j)
        CHECK(std::fabs(fit.beta[static_cast<std::size_t>(j)] -
                        planted[static_cast<std::size_t>(j)]) < 1e-8);
    for (double e : fit.residuals) CHECK(std::fabs(e) < 1e-8);
    CHECK(fit.residual_variance < 1e-12);
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("ols recovers planted coefficients within 5% under mild noise") {
    const std::vector<double> planted = {2.0, 1.0, -0.5};
    auto rng = make_rng(12);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::normal_distribution<double> eps(0.0, 0.1);  // variance 0.01
    std::vector<std::vector<double>> X;
    std::vector<double> y;
    for (int i = 0; i < 500; ++i) {
        const double x1 = u(rng), x2 = u(rng);
        X.push_back({1.0, x1, x2});
        y.push_back(planted[0] + planted[1] * x1 + planted[2] * x2 + eps(rng));
    }
    const auto fit = ols(X, y);
    for (int j = 0; j < 3; ++j) {
        const double b = fit.beta[static_cast<std::size_t>(j)];
        const double p = planted[static_cast<std::size_t>(j)];
        CHECK(std::fabs(b - p) / std::fabs(p) < 0.05);
    }
    CHECK(fit.residual_variance == doctest::Approx(0.01).epsilon(0.3));
    // Residuals are orthogonal to every column.
    for (std::size_t j = 0; j < 3; ++j) {
        double dot = 0.0;
        for (std::size_t i = 0; i < X.size(); ++i) dot += X[i][j] * fit.residuals[i];
        CHECK(std::fabs(dot) < 1e-6);
    }
}

TEST_CASE("ols reports rank deficiency with the offending columns") {
    std::vector<std::vector<double>> X;
    std::vector<double> y;
    auto rng = make_rng(13);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 30; ++i) {
        const double x = u(rng);
        X.push_back({1.0, x, 2.0 * x});  // column 2 = 2 x column 1
        y.push_back(x);
    }
    try {
        ols(X, y);
        FAIL("expected RankError");
    } catch (const RankError& e) {
        REQUIRE(!e.columns.empty());
        CHECK(e.columns[0] == 2);
    }
}

TEST_CASE("ols on an all-zero response yields zero coefficients") {
    std::vector<std::vector<double>> X;
    auto rng = make_rng(14);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 20; ++i) X.push_back({1.0, u(rng)});
    const std::vector<double> y(20, 0.0);
    const auto fit = ols(X, y);
    for (double b : fit.beta) CHECK(std::fabs(b) < 1e-12);
}

TEST_CASE("efficiency on a 56-to-28 path against V=28") {
    RoundSeries s;
    s.prices = {56.0, 28.0};
    s.fundamentals = {28.0, 28.0};
    s.volumes = {100, 300};
    s.trade_counts = {1, 3};
    const auto rep = efficiency(s);
    CHECK(rep.has_fundamental);
    CHECK(rep.ratio_start == doctest::Approx(2.0));
    CHECK(rep.ratio_end == doctest::Approx(1.0));
    CHECK(rep.ratio_min == doctest::Approx(1.0));
    CHECK(rep.ratio_max == doctest::Approx(2.0));
    CHECK(rep.mean_abs_deviation == doctest::Approx(0.5));
    CHECK(rep.total_volume == 400);
    CHECK(rep.total_trades == 4);
    CHECK(rep.mean_volume == doctest::Approx(200.0));
    CHECK(rep.avg_trade_size == doctest::Approx(100.0));
}

TEST_CASE("a market pinned to fundamental value scores zero deviation") {
    RoundSeries s;
    s.prices = {28.0, 28.0, 28.0};
    s.fundamentals = {28.0, 28.0, 28.0};
    s.volumes = {0, 0, 0};
    s.trade_counts = {0, 0, 0};
    const auto rep = efficiency(s);
    CHECK(rep.mean_abs_deviation == 0.0);
    CHECK(rep.ratio_std == 0.0);
    CHECK(rep.volatility == 0.0);
}

TEST_CASE("volatility is the population std of simple returns") {
    RoundSeries s;
    s.prices = {30.0, 33.0, 29.7};  // returns +10%, -10%
    s.volumes = {100, 50, 0};
    s.trade_counts = {2, 1, 0};
    const auto rep = efficiency(s);
    CHECK(!rep.has_fundamental);
    CHECK(rep.volatility == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(rep.mean_volume == doctest::Approx(50.0));
    CHECK(rep.trades_per_round == doctest::Approx(1.0));
    RoundSeries single;
    single.prices = {28.0};
    CHECK_THROWS_AS(efficiency(single), std::invalid_argument);
}

TEST_CASE("cosine similarity of bag-of-words reasoning") {
    CHECK(cosine_similarity("buy the dip", "buy the dip") == doctest::Approx(1.0));
    CHECK(cosine_similarity("Buy, the DIP!", "buy the dip") == doctest::Approx(1.0));
    CHECK(cosine_similarity("alpha beta", "gamma delta") == doctest::Approx(0.0));
    CHECK(cosine_similarity("a b", "a c") == doctest::Approx(0.5));
    CHECK(cosine_similarity("", "") == doctest::Approx(1.0));
}

TEST_CASE("strategy consistency is 1.0 for identical reasoning texts") {
    const auto result = synthetic_result({"value", "value"},
                                         {{1, -1, 1, -1, 1, -1}, {1, -1, 1, -1, 1, -1}});
    const auto rep = consistency_metrics(result);
    CHECK(rep.sc.at("value") == doctest::Approx(1.0));
    // Perfectly alternating decisions: lag-1 correlation -1.
    REQUIRE(rep.dc.at("value").has_value());
    CHECK(*rep.dc.at("value") == doctest::Approx(-1.0));
}

TEST_CASE("constant decision series has no defined lag-1 correlation") {
    const auto result = synthetic_result({"value"}, {{1, 1, 1, 1, 1}});
    const auto rep = consistency_metrics(result);
    CHECK(!rep.dc.at("value").has_value());
}

TEST_CASE("persistent decisions give positive lag-1 correlation") {
    const auto result = synthetic_result({"value"}, {{1, 1, 1, -1, -1, -1, 1, 1, 1}});
    const auto rep = consistency_metrics(result);
    REQUIRE(rep.dc.at("value").has_value());
    CHECK(*rep.dc.at("value") > 0.0);
}

TEST_CASE("within-type variance vanishes when types act in unison") {
    const auto result = synthetic_result(
        {"value", "value", "pessimistic", "pessimistic"},
        {{1, 1, 1}, {1, 1, 1}, {-1, -1, -1}, {-1, -1, -1}});
    const auto check = decision_variance(result);
    CHECK(check.pooled == doctest::Approx(1.0));
    CHECK(check.within.at("value") == doctest::Approx(0.0));
    CHECK(check.within.at("pessimistic") == doctest::Approx(0.0));
}

TEST_CASE("behavior report aggregates decisions, orders, and keywords") {
    auto result = synthetic_result({"value", "pessimistic"}, {{1, 1}, {-1, -1}},
                                   "asset undervalued versus fundamental");
    const auto rep = behavior(result);
    REQUIRE(rep.types.size() == 2);
    const auto& value = rep.types[1].type == "value" ? rep.types[1] : rep.types[0];
    const auto& pess = rep.types[1].type == "value" ? rep.types[0] : rep.types[1];
    CHECK(value.agents == 1);
    CHECK(value.decision_count == 2);
    CHECK(value.buy_ratio == doctest::Approx(1.0));
    CHECK(value.sell_ratio == doctest::Approx(0.0));
    CHECK(value.market_share == doctest::Approx(1.0));
    CHECK(value.keyword_counts.at("undervalued") == 2);
    CHECK(value.keyword_counts.at("fundamental") == 2);
    REQUIRE(value.mean_pf_at_buy.has_value());
    CHECK(*value.mean_pf_at_buy == doctest::Approx(1.0));  // price pinned at 28
    CHECK(pess.sell_ratio == doctest::Approx(1.0));
    REQUIRE(pess.mean_pf_at_sell.has_value());
}

TEST_CASE("value sweep steps exactly at the band edges") {
    AgentConfig agent;
    agent.type = AgentType::Value;  // alpha = 0.10, beta = 0.25
    const std::vector<double> grid = {0.5, 0.85, 0.9, 0.95, 1.0, 1.05, 1.1, 1.15, 1.5};
    const auto result = decision_sweep(agent, grid, 5);
    REQUIRE(result.cells.size() == grid.size());
    auto cell = [&](double rho) -> const SweepCell& {
        for (const auto& c : result.cells)
            if (c.rho == rho) return c;
        FAIL("missing cell");
        return result.cells[0];
    };
    for (double rho : {0.5, 0.85}) {
        CHECK(cell(rho).p_buy == doctest::Approx(1.0));
        CHECK(cell(rho).p_sell == doctest::Approx(0.0));
    }
    for (double rho : {0.9, 0.95, 1.0, 1.05, 1.1}) {  // band edges hold inclusively
        CAPTURE(rho);
        CHECK(cell(rho).p_hold == doctest::Approx(1.0));
    }
    for (double rho : {1.15, 1.5}) {
        CHECK(cell(rho).p_sell == doctest::Approx(1.0));
        CHECK(cell(rho).p_buy == doctest::Approx(0.0));
    }
    // Deviations beyond beta = 0.25 go out as market orders.
    CHECK(cell(0.5).market_share == doctest::Approx(1.0));
    CHECK(cell(0.85).market_share == doctest::Approx(0.0));
    CHECK(cell(1.5).market_share == doctest::Approx(1.0));
    CHECK(cell(0.85).mean_qty_pct > 0.0);
}

TEST_CASE("optimistic agent buys across the entire sweep grid") {
    AgentConfig agent;
    agent.type = AgentType::Optimistic;
    std::vector<double> grid;
    for (double rho = 0.1; rho <= 3.5 + 1e-9; rho += 0.1) grid.push_back(rho);
    const auto result = decision_sweep(agent, grid, 3);
    for (const auto& c : result.cells) {
        CAPTURE(c.rho);
        CHECK(c.p_buy == doctest::Approx(1.0));
    }
}

TEST_CASE("sweep is deterministic and validates its inputs") {
    AgentConfig agent;
    agent.type = AgentType::Random;
    const std::vector<double> grid = {0.8, 1.0, 1.2};
    const auto a = decision_sweep(agent, grid, 20);
    const auto b = decision_sweep(agent, grid, 20);
    REQUIRE(a.cells.size() == b.cells.size());
    for (std::size_t i = 0; i < a.cells.size(); ++i) {
        CHECK(a.cells[i].p_buy == b.cells[i].p_buy);
        CHECK(a.cells[i].p_sell == b.cells[i].p_sell);
        CHECK(a.cells[i].mean_qty_pct == b.cells[i].mean_qty_pct);
    }
    AgentConfig llm;
    llm.type = AgentType::Llm;
    CHECK_THROWS_AS(decision_sweep(llm, grid, 5), std::invalid_argument);
    CHECK_THROWS_AS(decision_sweep(agent, grid, 0), std::invalid_argument);
    CHECK_THROWS_AS(decision_sweep(agent, {0.0}, 5), std::invalid_argument);
}

TEST_CASE("wealth report separates total and trading-only wealth") {
    auto result = synthetic_result({"value"}, {{0, 0}});
    // Round 2 account: unchanged trading position, 24,000.00 of dividends.
    result.records[1].accounts[0].dividend_cash = money_parse("24000.00");
    const auto rep = wealth_report(result);
    REQUIRE(!rep.points.empty());
    const auto& start = rep.points.front();
    CHECK(start.round == 0);
    CHECK(start.trading_wealth == doctest::Approx(1'280'000.0));
    CHECK(start.total_wealth == doctest::Approx(1'280'000.0));
    const auto& end = rep.points.back();
    CHECK(end.trading_wealth == doctest::Approx(1'280'000.0));
    CHECK(end.total_wealth == doctest::Approx(1'304'000.0));
    CHECK(rep.trading_growth_pct.at("value") == doctest::Approx(0.0));
    CHECK(rep.total_growth_pct.at("value") == doctest::Approx(1.875));
}
