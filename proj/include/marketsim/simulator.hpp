#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "marketsim/account.hpp"
#include "marketsim/asset_model.hpp"
#include "marketsim/decision.hpp"
#include "marketsim/llm.hpp"
#include "marketsim/matching.hpp"
#include "marketsim/orderbook.hpp"
#include "marketsim/strategies.hpp"

namespace marketsim {

struct AgentConfig {
    AgentType type = AgentType::Value;
    std::string llm_type;  // system-prompt key for Llm agents
    StrategyParams params;
    bool use_linear = false;
    LinearCoefficients linear;
    double cash_multiplier = 1.0;
    double shares_multiplier = 1.0;
    bool hide_fundamental = false;
    std::vector<std::string> scripted_payloads;  // consumed one per round
};

struct Scenario {
    std::string name = "scenario";
    int rounds = 0;  // round budget (equals T for finite horizons)
    HorizonKind horizon = HorizonKind::Infinite;
    double redemption_value = 0.0;  // K, finite only
    Money initial_price = 0;
    std::uint64_t seed = 42;
    double interest_rate = 0.05;
    BernoulliDividend dividend;
    Money base_cash = 100'000'000;      // 1,000,000.00
    std::int64_t base_shares = 10'000;
    bool hide_fundamental = false;
    std::vector<AgentConfig> agents;
    std::vector<double> news;  // optional per-round signal, 1-indexed by round

    MarketParams market_params() const;
};

struct OrderEvent {
    int round = 0;
    OrderId order_id = 0;
    AgentId agent_id = 0;
    Side side = Side::Buy;
    OrderKind kind = OrderKind::Limit;
    std::int64_t quantity = 0;
    std::optional<Money> price;
    std::string event;  // placed | filled | partial | cancelled | converted
};

struct DecisionRecord {
    AgentId agent_id = 0;
    TradeDecision decision;
    std::vector<OrderRejection> rejections;
    int signed_decision = 0;  // sign of net requested quantity
    std::string prompt_hash;  // llm agents only
    std::string raw_payload;  // llm agents only
    std::string validation_outcome = "ok";
};

struct RoundRecord {
    int round = 0;
    Money clearing_price = 0;
    double fundamental_value = 0.0;
    std::int64_t volume = 0;
    std::int64_t trade_count = 0;
    std::optional<Money> best_bid;
    std::optional<Money> best_ask;
    std::optional<Money> dividend_paid;
    std::vector<Trade> trades;
    std::vector<AgentAccount> accounts;  // end-of-round snapshot
    std::vector<DecisionRecord> decisions;
    std::vector<OrderEvent> order_events;
    std::vector<std::string> anomalies;
};

struct AgentMeta {
    AgentId agent_id = 0;
    AgentType type = AgentType::Value;
    std::string llm_type;
};

struct SimulationResult {
    std::vector<RoundRecord> records;
    std::vector<AgentMeta> agents;
    std::vector<AgentAccount> initial_accounts;
    Money initial_price = 0;
};

/// Engine invariant violation (conservation or solvency). Indicates a bug in
/// the engine, never agent behavior; aborts the run with a diagnostic.
struct SimulationInvariantError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Deterministic permutation keyed by (seed, round); uniform across seeds.
std::vector<AgentId> seeded_shuffle(std::vector<AgentId> agent_ids, std::uint64_t seed,
                                    int round);

/// Runs the full scenario. `client` supplies completions for Llm agents; when
/// null, a scripted client is built from the agent configs' queued payloads.
SimulationResult run(const Scenario& scenario, LlmClient* client = nullptr);

}  // namespace marketsim
