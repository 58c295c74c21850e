#include "marketsim/csvio.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "marketsim/llm.hpp"

namespace marketsim {

namespace {

constexpr const char* kArtifactVersion = "1.0.0";

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    return out;
}

std::string opt_money(const std::optional<Money>& m) {
    return m ? money_to_string(*m) : std::string();
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

}  // namespace

void write_outputs(const Scenario& scenario, const SimulationResult& result,
                   const std::string& out_dir, const RunInfo& info) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);

    std::size_t rounds_rows = 0, trades_rows = 0, orders_rows = 0, agents_rows = 0,
                decisions_rows = 0;

    {
        auto out = open_out(dir / "rounds.csv");
        out << "round,clearing_price,fundamental_value,volume,trades,best_bid,best_ask,"
               "dividend_paid\n";
        for (const auto& r : result.records) {
            out << r.round << ',' << money_to_string(r.clearing_price) << ','
                << g17(r.fundamental_value) << ',' << r.volume << ',' << r.trade_count
                << ',' << opt_money(r.best_bid) << ',' << opt_money(r.best_ask) << ','
                << opt_money(r.dividend_paid) << '\n';
            ++rounds_rows;
        }
    }
    {
        auto out = open_out(dir / "trades.csv");
        out << "round,trade_id,price,quantity,buyer_agent,seller_agent,buy_order,"
               "sell_order,phase\n";
        for (const auto& r : result.records)
            for (const auto& t : r.trades) {
                out << t.round << ',' << t.trade_id << ',' << money_to_string(t.price)
                    << ',' << t.quantity << ',' << t.buyer_agent << ',' << t.seller_agent
                    << ',' << t.buy_order << ',' << t.sell_order << ','
                    << to_string(t.phase) << '\n';
                ++trades_rows;
            }
    }
    {
        auto out = open_out(dir / "orders.csv");
        out << "round,order_id,agent_id,side,kind,quantity,price,event\n";
        for (const auto& r : result.records)
            for (const auto& e : r.order_events) {
                out << e.round << ',' << e.order_id << ',' << e.agent_id << ','
                    << to_string(e.side) << ',' << to_string(e.kind) << ',' << e.quantity
                    << ',' << opt_money(e.price) << ',' << e.event << '\n';
                ++orders_rows;
            }
    }
    {
        auto out = open_out(dir / "agents.csv");
        out << "round,agent_id,type,main_cash,dividend_cash,shares,committed_cash,"
               "committed_shares,wealth\n";
        auto emit = [&](int round, const std::vector<AgentAccount>& accounts, Money price) {
            for (const auto& a : accounts) {
                const auto& meta = result.agents[static_cast<std::size_t>(a.agent_id)];
                const std::string type = meta.type == AgentType::Llm
                                             ? "llm_" + meta.llm_type
                                             : to_string(meta.type);
                out << round << ',' << a.agent_id << ',' << type << ','
                    << money_to_string(a.main_cash) << ','
                    << money_to_string(a.dividend_cash) << ',' << a.shares << ','
                    << money_to_string(a.committed_cash) << ',' << a.committed_shares
                    << ',' << money_to_string(wealth(a, price)) << '\n';
                ++agents_rows;
            }
        };
        emit(0, result.initial_accounts, result.initial_price);
        for (const auto& r : result.records) emit(r.round, r.accounts, r.clearing_price);
    }
    {
        auto out = open_out(dir / "decisions.jsonl");
        for (const auto& r : result.records)
            for (const auto& d : r.decisions) {
                nlohmann::json j;
                j["round"] = r.round;
                j["agent_id"] = d.agent_id;
                j["signed_decision"] = d.signed_decision;
                j["validation_outcome"] = d.validation_outcome;
                j["decision"] = nlohmann::json::parse(serialize_decision(d.decision));
                if (!d.prompt_hash.empty()) j["prompt_hash"] = d.prompt_hash;
                if (!d.raw_payload.empty()) j["raw_payload"] = d.raw_payload;
                if (!d.rejections.empty()) {
                    nlohmann::json rejections = nlohmann::json::array();
                    for (const auto& rej : d.rejections)
                        rejections.push_back({{"side", to_string(rej.request.side)},
                                              {"quantity", rej.request.quantity},
                                              {"reason", rej.reason}});
                    j["rejections"] = rejections;
                }
                out << j.dump() << '\n';
                ++decisions_rows;
            }
    }
    {
        auto out = open_out(dir / "manifest.json");
        nlohmann::json j;
        j["artifact_version"] = kArtifactVersion;
        j["scenario_name"] = scenario.name;
        j["seed"] = scenario.seed;
        j["config_digest"] = scenario_digest(scenario);
        j["llm_mode"] = info.llm_mode;
        j["model_id"] = info.model_id;
        j["started_at"] = info.started_at;
        j["finished_at"] = info.finished_at;
        j["rounds"] = result.records.size();
        j["files"] = {{"rounds.csv", rounds_rows},   {"trades.csv", trades_rows},
                      {"orders.csv", orders_rows},   {"agents.csv", agents_rows},
                      {"decisions.jsonl", decisions_rows}};
        out << j.dump(2) << '\n';
    }
}

RoundSeries read_rounds_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty rounds file: " + path);
    RoundSeries s;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() < 5) throw std::runtime_error("malformed rounds row: " + line);
        s.prices.push_back(money_to_double(money_parse(f[1])));
        s.fundamentals.push_back(std::stod(f[2]));
        s.volumes.push_back(std::stoll(f[3]));
        s.trade_counts.push_back(std::stoll(f[4]));
    }
    return s;
}

void write_report(const EfficiencyReport& r, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    {
        auto out = open_out(fs::path(out_dir) / "efficiency.csv");
        out << "metric,value\n";
        if (r.has_fundamental) {
            out << "ratio_start," << g17(r.ratio_start) << '\n';
            out << "ratio_end," << g17(r.ratio_end) << '\n';
            out << "ratio_min," << g17(r.ratio_min) << '\n';
            out << "ratio_max," << g17(r.ratio_max) << '\n';
            out << "ratio_std," << g17(r.ratio_std) << '\n';
            out << "mean_abs_deviation," << g17(r.mean_abs_deviation) << '\n';
        }
        out << "volatility," << g17(r.volatility) << '\n';
        out << "mean_volume," << g17(r.mean_volume) << '\n';
        out << "trades_per_round," << g17(r.trades_per_round) << '\n';
        out << "avg_trade_size," << g17(r.avg_trade_size) << '\n';
        out << "total_volume," << r.total_volume << '\n';
        out << "total_trades," << r.total_trades << '\n';
    }
    {
        auto out = open_out(fs::path(out_dir) / "report.txt");
        out << "Market efficiency summary\n";
        out << "=========================\n";
        if (r.has_fundamental) {
            char buf[256];
            std::snprintf(buf, sizeof(buf),
                          "P/F ratio: start %.4f, end %.4f (min %.4f, max %.4f, std %.4f)\n",
                          r.ratio_start, r.ratio_end, r.ratio_min, r.ratio_max, r.ratio_std);
            out << buf;
            std::snprintf(buf, sizeof(buf), "Mean |P/V - 1|: %.4f\n", r.mean_abs_deviation);
            out << buf;
        } else {
            out << "Fundamental series unavailable; ratio metrics omitted.\n";
        }
        char buf[256];
        std::snprintf(buf, sizeof(buf), "Return volatility: %.6f\n", r.volatility);
        out << buf;
        std::snprintf(buf, sizeof(buf),
                      "Volume: mean %.2f/round, %.2f trades/round, avg trade size %.2f\n",
                      r.mean_volume, r.trades_per_round, r.avg_trade_size);
        out << buf;
        out << "Total volume: " << r.total_volume << ", total trades: " << r.total_trades
            << '\n';
    }
}

void write_sweep_csv(const SweepResult& sweep, const std::string& path) {
    auto out = open_out(path);
    out << "agent_type,rho,decision,probability,mean_qty_pct,market_share,"
           "mean_valuation,mean_price_target\n";
    for (const auto& c : sweep.cells) {
        const struct {
            const char* name;
            double p;
        } rows[] = {{"Buy", c.p_buy}, {"Sell", c.p_sell}, {"Hold", c.p_hold}};
        for (const auto& row : rows)
            out << c.agent_type << ',' << g17(c.rho) << ',' << row.name << ','
                << g17(row.p) << ',' << g17(c.mean_qty_pct) << ','
                << g17(c.market_share) << ',' << g17(c.mean_valuation) << ','
                << g17(c.mean_price_target) << '\n';
    }
}

}  // namespace marketsim
