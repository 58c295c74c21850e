#pragma once

#include <deque>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "marketsim/account.hpp"
#include "marketsim/decision.hpp"

namespace marketsim {

struct PromptBundle {
    std::string system_prompt;
    std::string user_prompt;
};

/// Base system prompt for an LLM agent type ("value", "market_maker",
/// "speculator", ...). Throws on unknown types.
const std::string& system_prompt_for(const std::string& llm_type);

/// Renders the full user prompt: market state, depth, outstanding orders,
/// position, price history, dividend/redemption/interest information,
/// analysis requirements, and trading options, in that order. Monetary
/// values always carry two decimals; a hidden fundamental renders as
/// "Unavailable".
PromptBundle assemble_prompt(const std::string& llm_type, const MarketSnapshot& snapshot,
                             const AgentAccount& account,
                             const std::vector<Order>& outstanding_orders);

struct ParseError : std::runtime_error {
    std::string path;  // field path, e.g. "orders[0].price_limit"
    ParseError(std::string p, const std::string& what)
        : std::runtime_error(what + " at " + p), path(std::move(p)) {}
};

/// Strict schema validation of a raw model payload. Unknown fields are
/// ignored; numeric strings are coerced.
TradeDecision parse_decision(const std::string& payload);
std::string serialize_decision(const TradeDecision& decision);

struct RawCompletion {
    std::string text;
    std::string model_id;
    double latency_ms = 0.0;
    int attempts = 1;
    std::optional<int> prompt_tokens;
    std::optional<int> completion_tokens;
};

enum class LlmMode { Scripted, Http };

struct LlmClientConfig {
    LlmMode mode = LlmMode::Scripted;
    std::string endpoint;  // e.g. http://host:port/v1/chat/completions
    std::string model = "gpt-4o";
    double temperature = 0.0;
    int max_retries = 3;
    double timeout_seconds = 30.0;
    std::string api_key_env = "OPENAI_API_KEY";
    double backoff_initial_ms = 500.0;
};

struct TransportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ScriptError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class LlmClient {
  public:
    virtual ~LlmClient() = default;
    virtual RawCompletion complete(const PromptBundle& bundle, AgentId agent,
                                   int round) = 0;
};

/// Deterministic replacement for a live model: replays queued payloads per
/// agent in round order. An empty queue is a configuration error.
class ScriptedClient : public LlmClient {
  public:
    void queue(AgentId agent, std::string payload);
    RawCompletion complete(const PromptBundle& bundle, AgentId agent, int round) override;

  private:
    std::unordered_map<AgentId, std::deque<std::string>> queues_;
};

/// Chat-completions HTTP client with exponential-backoff retries.
class HttpClient : public LlmClient {
  public:
    explicit HttpClient(LlmClientConfig config);
    RawCompletion complete(const PromptBundle& bundle, AgentId agent, int round) override;

  private:
    LlmClientConfig config_;
    std::string api_key_;
};

std::unique_ptr<LlmClient> make_client(const LlmClientConfig& config);

}  // namespace marketsim
