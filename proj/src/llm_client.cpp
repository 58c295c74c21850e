#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "marketsim/llm.hpp"

namespace marketsim {

void ScriptedClient::queue(AgentId agent, std::string payload) {
    queues_[agent].push_back(std::move(payload));
}

RawCompletion ScriptedClient::complete(const PromptBundle&, AgentId agent, int round) {
    auto it = queues_.find(agent);
    if (it == queues_.end() || it->second.empty())
        throw ScriptError("scripted client has no payload queued for agent " +
                          std::to_string(agent) + " at round " + std::to_string(round));
    RawCompletion r;
    r.text = std::move(it->second.front());
    it->second.pop_front();
    r.model_id = "scripted";
    return r;
}

HttpClient::HttpClient(LlmClientConfig config) : config_(std::move(config)) {
    if (config_.endpoint.empty())
        throw std::invalid_argument("http mode requires an endpoint");
    const char* key = std::getenv(config_.api_key_env.c_str());
    if (!key || !*key)
        throw std::invalid_argument("http mode requires the API key environment variable " +
                                    config_.api_key_env);
    api_key_ = key;
}

RawCompletion HttpClient::complete(const PromptBundle& bundle, AgentId agent, int round) {
    // Split endpoint into base url and path.
    std::string base = config_.endpoint;
    std::string path = "/";
    const auto scheme = base.find("://");
    const auto slash = base.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    if (slash != std::string::npos) {
        path = base.substr(slash);
        base = base.substr(0, slash);
    }

    nlohmann::json body;
    body["model"] = config_.model;
    body["temperature"] = config_.temperature;
    body["messages"] = {{{"role", "system"}, {"content", bundle.system_prompt}},
                        {{"role", "user"}, {"content", bundle.user_prompt}}};
    body["response_format"] = {{"type", "json_object"}};

    const auto started = std::chrono::steady_clock::now();
    std::string last_error;
    for (int attempt = 1; attempt <= config_.max_retries + 1; ++attempt) {
        httplib::Client cli(base);
        cli.set_read_timeout(std::chrono::milliseconds(
            static_cast<int>(config_.timeout_seconds * 1000)));
        cli.set_connection_timeout(std::chrono::milliseconds(
            static_cast<int>(config_.timeout_seconds * 1000)));
        httplib::Headers headers = {{"Authorization", "Bearer " + api_key_}};
        auto res = cli.Post(path, headers, body.dump(), "application/json");
        if (res && res->status == 200) {
            try {
                auto j = nlohmann::json::parse(res->body);
                RawCompletion out;
                out.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
                out.model_id = j.value("model", config_.model);
                out.attempts = attempt;
                out.latency_ms = std::chrono::duration<double, std::milli>(
                                     std::chrono::steady_clock::now() - started)
                                     .count();
                if (j.contains("usage")) {
                    out.prompt_tokens = j["usage"].value("prompt_tokens", 0);
                    out.completion_tokens = j["usage"].value("completion_tokens", 0);
                }
                return out;
            } catch (const std::exception& e) {
                last_error = std::string("malformed completion body: ") + e.what();
            }
        } else if (res) {
            last_error = "HTTP " + std::to_string(res->status);
        } else {
            last_error = "transport failure: " + httplib::to_string(res.error());
        }
        if (attempt <= config_.max_retries) {
            const double ms = config_.backoff_initial_ms * (1 << (attempt - 1));
            std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(ms));
        }
    }
    throw TransportError("chat completion failed for agent " + std::to_string(agent) +
                         " round " + std::to_string(round) + ": " + last_error);
}

std::unique_ptr<LlmClient> make_client(const LlmClientConfig& config) {
    if (config.mode == LlmMode::Scripted) return std::make_unique<ScriptedClient>();
    return std::make_unique<HttpClient>(config);
}

}  // namespace marketsim
