#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "marketsim/ols.hpp"
#include "marketsim/simulator.hpp"

namespace marketsim {

/// Price-series inputs for the efficiency metrics; recomputable from the
/// per-round CSV alone so in-run and post-hoc reports agree exactly.
struct RoundSeries {
    std::vector<double> prices;        // clearing price, units
    std::vector<double> fundamentals;  // fundamental value, units; empty = unavailable
    std::vector<std::int64_t> volumes;
    std::vector<std::int64_t> trade_counts;
};

struct EfficiencyReport {
    bool has_fundamental = false;
    double ratio_start = 0.0;
    double ratio_end = 0.0;
    double ratio_min = 0.0;
    double ratio_max = 0.0;
    double ratio_std = 0.0;
    double mean_abs_deviation = 0.0;  // mean |P/V - 1|
    double volatility = 0.0;          // std of per-round simple returns
    double mean_volume = 0.0;
    double trades_per_round = 0.0;
    double avg_trade_size = 0.0;
    std::int64_t total_volume = 0;
    std::int64_t total_trades = 0;
};

EfficiencyReport efficiency(const RoundSeries& series);
EfficiencyReport efficiency(const std::vector<RoundRecord>& records);
RoundSeries series_from_records(const std::vector<RoundRecord>& records);

using KeywordConfig = std::map<std::string, std::vector<std::string>>;
KeywordConfig default_keywords();

struct TypeBehavior {
    std::string type;
    int agents = 0;
    std::int64_t decision_count = 0;
    double buy_ratio = 0.0;     // buy decisions / all decisions
    double sell_ratio = 0.0;
    double market_share = 0.0;  // market orders / all orders
    double trades_per_round = 0.0;
    std::map<std::string, std::int64_t> keyword_counts;
    std::optional<double> mean_pf_at_buy;
    std::optional<double> mean_pf_at_sell;
};

struct BehaviorReport {
    std::vector<TypeBehavior> types;
};

BehaviorReport behavior(const SimulationResult& result,
                        const KeywordConfig& keywords = default_keywords());

struct ConsistencyReport {
    // Strategy consistency: mean pairwise cosine similarity of bag-of-words
    // reasoning vectors within a type. In [0, 1].
    std::map<std::string, double> sc;
    // Decision consistency: lag-1 Pearson correlation of signed decisions
    // (Buy=+1, Hold=0, Sell=-1), averaged over agents of the type. NA
    // (nullopt) when a series has zero variance.
    std::map<std::string, std::optional<double>> dc;
};

ConsistencyReport consistency_metrics(const SimulationResult& result);

double cosine_similarity(const std::string& a, const std::string& b);

/// Within-type vs pooled variance of signed decisions ("agents of a type act
/// more alike than the population").
struct VarianceCheck {
    double pooled = 0.0;
    std::map<std::string, double> within;
};
VarianceCheck decision_variance(const SimulationResult& result);

struct SweepCell {
    std::string agent_type;
    double rho = 0.0;
    double p_buy = 0.0;
    double p_sell = 0.0;
    double p_hold = 0.0;
    double mean_qty_pct = 0.0;  // mean order size as % of share endowment
    double market_share = 0.0;  // market orders / all orders in the cell
    double mean_valuation = 0.0;
    double mean_price_target = 0.0;
};

struct SweepResult {
    std::vector<SweepCell> cells;
};

struct SweepConfig {
    Money fundamental = 2800;  // V used to place P = rho * V
    Money base_cash = 100'000'000;
    std::int64_t base_shares = 10'000;
    // Synthetic book: `book_levels` per side at multiples of
    // `book_level_step` (fraction of P), `book_level_shares` each.
    int book_levels = 3;
    double book_level_step = 0.01;
    std::int64_t book_level_shares = 1'000;
    std::uint64_t seed = 42;
};

/// Queries a rule agent `trials` times per grid point against a synthetic
/// snapshot with P = rho * V and tabulates the outcomes.
SweepResult decision_sweep(const AgentConfig& agent, const std::vector<double>& grid,
                           int trials, const SweepConfig& config = {});

struct WealthPoint {
    int round = 0;  // 0 = initial endowment
    std::string type;
    double total_wealth = 0.0;    // includes dividend cash
    double trading_wealth = 0.0;  // excludes dividend cash
};

struct WealthReport {
    std::vector<WealthPoint> points;
    std::map<std::string, double> total_growth_pct;
    std::map<std::string, double> trading_growth_pct;
};

WealthReport wealth_report(const SimulationResult& result);

}  // namespace marketsim
