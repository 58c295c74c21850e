#include "marketsim/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace marketsim {

namespace {

using nlohmann::json;

double require_number(const json& j, const std::string& key, const std::string& path) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_number())
        throw ConfigError(path, "expected a number for '" + key + "'");
    return it->get<double>();
}

double optional_number(const json& j, const std::string& key, double fallback,
                       const std::string& path) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_number()) throw ConfigError(path + "." + key, "expected a number");
    return it->get<double>();
}

std::int64_t optional_int(const json& j, const std::string& key, std::int64_t fallback,
                          const std::string& path) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_number_integer()) throw ConfigError(path + "." + key, "expected an integer");
    return it->get<std::int64_t>();
}

bool optional_bool(const json& j, const std::string& key, bool fallback,
                   const std::string& path) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_boolean()) throw ConfigError(path + "." + key, "expected a boolean");
    return it->get<bool>();
}

std::string optional_string(const json& j, const std::string& key,
                            const std::string& fallback, const std::string& path) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_string()) throw ConfigError(path + "." + key, "expected a string");
    return it->get<std::string>();
}

StrategyParams parse_params(const json& j, const std::string& path) {
    StrategyParams p;
    p.alpha = optional_number(j, "alpha", p.alpha, path);
    p.beta = optional_number(j, "beta", p.beta, path);
    p.eta = optional_number(j, "eta", p.eta, path);
    p.mu = optional_number(j, "mu", p.mu, path);
    p.nu = optional_number(j, "nu", p.nu, path);
    p.xi = optional_number(j, "xi", p.xi, path);
    p.kappa = optional_number(j, "kappa", p.kappa, path);
    p.optimism_multiplier =
        optional_number(j, "optimism_multiplier", p.optimism_multiplier, path);
    p.psi = optional_number(j, "psi", p.psi, path);
    p.omega = optional_number(j, "omega", p.omega, path);
    p.lambda = optional_number(j, "lambda", p.lambda, path);
    p.max_half_spread = optional_number(j, "max_half_spread", p.max_half_spread, path);
    p.delta_fraction = optional_number(j, "delta_fraction", p.delta_fraction, path);
    p.target_inventory = optional_int(j, "target_inventory", p.target_inventory, path);
    p.ma_window = static_cast<int>(optional_int(j, "ma_window", p.ma_window, path));
    p.vol_window = static_cast<int>(optional_int(j, "vol_window", p.vol_window, path));
    p.sigma_floor = optional_number(j, "sigma_floor", p.sigma_floor, path);
    p.max_fraction = optional_number(j, "max_fraction", p.max_fraction, path);
    return p;
}

LinearCoefficients parse_linear(const json& j, const std::string& path) {
    LinearCoefficients c;
    c.beta0 = optional_number(j, "beta0", 0.0, path);
    if (auto it = j.find("betas"); it != j.end()) {
        if (!it->is_array()) throw ConfigError(path + ".betas", "expected an array");
        for (const auto& v : *it) {
            if (!v.is_number()) throw ConfigError(path + ".betas", "expected numbers");
            c.betas.push_back(v.get<double>());
        }
    }
    c.noise_sd = optional_number(j, "noise_sd", 0.0, path);
    c.gamma0 = optional_number(j, "gamma0", 0.0, path);
    c.gamma1 = optional_number(j, "gamma1", 0.0, path);
    c.gamma2 = optional_number(j, "gamma2", 0.0, path);
    return c;
}

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError("$", std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("$", "scenario must be an object");

    Scenario s;
    s.name = optional_string(j, "name", "scenario", "$");
    s.rounds = static_cast<int>(optional_int(j, "rounds", 0, "$"));
    const std::string horizon = optional_string(j, "horizon", "infinite", "$");
    if (horizon == "finite")
        s.horizon = HorizonKind::Finite;
    else if (horizon == "infinite")
        s.horizon = HorizonKind::Infinite;
    else
        throw ConfigError("horizon", "must be 'finite' or 'infinite'");
    s.redemption_value = optional_number(j, "redemption_value", 0.0, "$");
    s.initial_price = money_from_double(require_number(j, "initial_price", "initial_price"));
    s.seed = static_cast<std::uint64_t>(optional_int(j, "seed", 42, "$"));
    s.interest_rate = require_number(j, "interest_rate", "interest_rate");
    s.base_cash = money_from_double(optional_number(j, "base_cash", 1'000'000.0, "$"));
    s.base_shares = optional_int(j, "base_shares", 10'000, "$");
    s.hide_fundamental = optional_bool(j, "hide_fundamental", false, "$");

    if (auto it = j.find("dividend"); it != j.end()) {
        if (!it->is_object()) throw ConfigError("dividend", "expected an object");
        s.dividend.base = money_from_double(optional_number(*it, "base", 1.40, "dividend"));
        s.dividend.variation =
            money_from_double(optional_number(*it, "variation", 1.00, "dividend"));
        s.dividend.probability_high =
            optional_number(*it, "probability_high", 0.5, "dividend");
        s.dividend.payment_interval =
            static_cast<int>(optional_int(*it, "payment_interval", 1, "dividend"));
    }

    if (auto it = j.find("news"); it != j.end()) {
        if (!it->is_array()) throw ConfigError("news", "expected an array");
        for (const auto& v : *it) {
            if (!v.is_number()) throw ConfigError("news", "expected numbers");
            s.news.push_back(v.get<double>());
        }
    }

    auto agents_it = j.find("agents");
    if (agents_it == j.end() || !agents_it->is_array())
        throw ConfigError("agents", "expected an array of agent configs");
    for (std::size_t i = 0; i < agents_it->size(); ++i) {
        const std::string path = "agents[" + std::to_string(i) + "]";
        const json& a = (*agents_it)[i];
        if (!a.is_object()) throw ConfigError(path, "expected an object");
        AgentConfig cfg;
        const std::string type = optional_string(a, "type", "", path);
        if (type.empty()) throw ConfigError(path + ".type", "missing agent type");
        try {
            cfg.type = agent_type_from_string(type);
        } catch (const std::exception&) {
            throw ConfigError(path + ".type", "unknown agent type '" + type + "'");
        }
        cfg.llm_type = optional_string(a, "llm_type", "", path);
        if (cfg.type == AgentType::Llm && cfg.llm_type.empty())
            throw ConfigError(path + ".llm_type", "llm agents need an llm_type");
        cfg.cash_multiplier = optional_number(a, "cash_multiplier", 1.0, path);
        cfg.shares_multiplier = optional_number(a, "shares_multiplier", 1.0, path);
        cfg.hide_fundamental = optional_bool(a, "hide_fundamental", false, path);
        if (auto p = a.find("params"); p != a.end()) {
            if (!p->is_object()) throw ConfigError(path + ".params", "expected an object");
            cfg.params = parse_params(*p, path + ".params");
        }
        if (auto l = a.find("linear"); l != a.end()) {
            if (!l->is_object()) throw ConfigError(path + ".linear", "expected an object");
            cfg.linear = parse_linear(*l, path + ".linear");
            cfg.use_linear = true;
        }
        if (auto sp = a.find("scripted_payloads"); sp != a.end()) {
            if (!sp->is_array())
                throw ConfigError(path + ".scripted_payloads", "expected an array");
            for (const auto& v : *sp) {
                if (!v.is_string())
                    throw ConfigError(path + ".scripted_payloads", "expected strings");
                cfg.scripted_payloads.push_back(v.get<std::string>());
            }
        }
        const std::int64_t count = optional_int(a, "count", 1, path);
        if (count <= 0) throw ConfigError(path + ".count", "must be positive");
        for (std::int64_t c = 0; c < count; ++c) s.agents.push_back(cfg);
    }

    validate_scenario(s);
    return s;
}

Scenario load_scenario(const std::string& file_path) {
    std::ifstream in(file_path);
    if (!in) throw ConfigError("$", "cannot read scenario file " + file_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

void validate_scenario(const Scenario& s) {
    if (s.agents.empty()) throw ConfigError("agents", "at least one agent is required");
    if (s.rounds <= 0) throw ConfigError("rounds", "must be positive");
    if (s.initial_price <= 0) throw ConfigError("initial_price", "must be positive");
    if (s.interest_rate <= 0.0)
        throw ConfigError("interest_rate", "must be positive");
    if (s.dividend.payment_interval <= 0)
        throw ConfigError("dividend.payment_interval", "must be positive");
    if (s.dividend.probability_high < 0.0 || s.dividend.probability_high > 1.0)
        throw ConfigError("dividend.probability_high", "must be in [0, 1]");
    if (s.dividend.base < s.dividend.variation)
        throw ConfigError("dividend.variation", "exceeds base (negative dividend possible)");
    if (s.base_cash < 0) throw ConfigError("base_cash", "must be non-negative");
    if (s.base_shares < 0) throw ConfigError("base_shares", "must be non-negative");
    if (s.horizon == HorizonKind::Finite && s.redemption_value < 0.0)
        throw ConfigError("redemption_value", "must be non-negative");
    for (std::size_t i = 0; i < s.agents.size(); ++i) {
        const auto& a = s.agents[i];
        const std::string path = "agents[" + std::to_string(i) + "]";
        if (a.cash_multiplier < 0.0)
            throw ConfigError(path + ".cash_multiplier", "must be non-negative");
        if (a.shares_multiplier < 0.0)
            throw ConfigError(path + ".shares_multiplier", "must be non-negative");
        if (a.params.max_fraction <= 0.0)
            throw ConfigError(path + ".params.max_fraction", "must be positive");
    }
}

std::string scenario_canonical_json(const Scenario& s) {
    json j;
    j["name"] = s.name;
    j["rounds"] = s.rounds;
    j["horizon"] = s.horizon == HorizonKind::Finite ? "finite" : "infinite";
    j["redemption_value"] = s.redemption_value;
    j["initial_price"] = money_to_string(s.initial_price);
    j["seed"] = s.seed;
    j["interest_rate"] = s.interest_rate;
    j["base_cash"] = money_to_string(s.base_cash);
    j["base_shares"] = s.base_shares;
    j["hide_fundamental"] = s.hide_fundamental;
    j["dividend"] = {{"base", money_to_string(s.dividend.base)},
                     {"variation", money_to_string(s.dividend.variation)},
                     {"probability_high", s.dividend.probability_high},
                     {"payment_interval", s.dividend.payment_interval}};
    j["news"] = s.news;
    json agents = json::array();
    for (const auto& a : s.agents) {
        json ja;
        ja["type"] = to_string(a.type);
        ja["llm_type"] = a.llm_type;
        ja["cash_multiplier"] = a.cash_multiplier;
        ja["shares_multiplier"] = a.shares_multiplier;
        ja["hide_fundamental"] = a.hide_fundamental;
        ja["params"] = {{"alpha", a.params.alpha},
                        {"beta", a.params.beta},
                        {"eta", a.params.eta},
                        {"mu", a.params.mu},
                        {"nu", a.params.nu},
                        {"xi", a.params.xi},
                        {"kappa", a.params.kappa},
                        {"optimism_multiplier", a.params.optimism_multiplier},
                        {"psi", a.params.psi},
                        {"omega", a.params.omega},
                        {"lambda", a.params.lambda},
                        {"max_half_spread", a.params.max_half_spread},
                        {"delta_fraction", a.params.delta_fraction},
                        {"target_inventory", a.params.target_inventory},
                        {"ma_window", a.params.ma_window},
                        {"vol_window", a.params.vol_window},
                        {"sigma_floor", a.params.sigma_floor},
                        {"max_fraction", a.params.max_fraction}};
        if (a.use_linear)
            ja["linear"] = {{"beta0", a.linear.beta0},   {"betas", a.linear.betas},
                            {"noise_sd", a.linear.noise_sd}, {"gamma0", a.linear.gamma0},
                            {"gamma1", a.linear.gamma1}, {"gamma2", a.linear.gamma2}};
        ja["scripted_payloads"] = a.scripted_payloads;
        agents.push_back(ja);
    }
    j["agents"] = agents;
    return j.dump();
}

std::string scenario_digest(const Scenario& s) {
    const std::string canon = scenario_canonical_json(s);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace marketsim
