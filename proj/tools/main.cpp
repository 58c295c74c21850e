#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "marketsim/analysis.hpp"
#include "marketsim/csvio.hpp"

namespace {

using namespace marketsim;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

std::string utc_now() {
    const std::time_t t =
        std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::vector<double> parse_grid(const std::string& spec) {
    double a = 0, b = 0, step = 0;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &a, &b, &step) != 3 || step <= 0 ||
        b < a)
        throw ConfigError("--grid", "expected a:b:step with step > 0 and b >= a");
    std::vector<double> grid;
    for (int i = 0;; ++i) {
        const double v = a + step * i;
        if (v > b + step * 1e-9) break;
        grid.push_back(v);
    }
    return grid;
}

AgentConfig load_agent_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("$", "cannot read agent config " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    // Reuse the scenario parser by wrapping the agent object in a minimal
    // scenario; the wrapper keys never reach the sweep.
    nlohmann::json agent = nlohmann::json::parse(buf.str(), nullptr, false);
    if (agent.is_discarded() || !agent.is_object())
        throw ConfigError("$", "agent config must be a JSON object");
    nlohmann::json wrapper = {{"initial_price", 28.0},
                              {"interest_rate", 0.05},
                              {"rounds", 1},
                              {"agents", nlohmann::json::array({agent})}};
    return parse_scenario(wrapper.dump()).agents.at(0);
}

int cmd_run(const std::string& scenario_path, std::optional<std::uint64_t> seed,
            const std::string& out_dir, const std::string& llm_mode,
            const std::string& endpoint, const std::string& model) {
    Scenario scenario = load_scenario(scenario_path);
    if (seed) scenario.seed = *seed;

    std::unique_ptr<LlmClient> client;
    RunInfo info;
    if (llm_mode == "http") {
        LlmClientConfig cfg;
        cfg.mode = LlmMode::Http;
        cfg.endpoint = endpoint;
        if (!model.empty()) cfg.model = model;
        client = make_client(cfg);  // refuses before any round without an API key
        info.llm_mode = "http";
        info.model_id = cfg.model;
    } else if (llm_mode != "scripted") {
        throw ConfigError("--llm", "must be 'scripted' or 'http'");
    }

    info.started_at = utc_now();
    const SimulationResult result = run(scenario, client.get());
    info.finished_at = utc_now();

    write_outputs(scenario, result, out_dir, info);
    write_report(efficiency(result.records), out_dir);
    std::cout << "run complete: " << result.records.size() << " rounds -> " << out_dir
              << "\n";
    return kExitOk;
}

int cmd_sweep(const std::string& agent_path, const std::string& grid_spec, int trials,
              const std::string& out_path) {
    const AgentConfig agent = load_agent_config(agent_path);
    const auto grid = parse_grid(grid_spec);
    const SweepResult sweep = decision_sweep(agent, grid, trials);
    write_sweep_csv(sweep, out_path);
    std::cout << "sweep complete: " << grid.size() << " grid points -> " << out_path
              << "\n";
    return kExitOk;
}

int cmd_report(const std::string& run_dir) {
    const RoundSeries series = read_rounds_csv(run_dir + "/rounds.csv");
    write_report(efficiency(series), run_dir);
    std::cout << "report written to " << run_dir << "\n";
    return kExitOk;
}

int cmd_validate(const std::string& scenario_path) {
    const Scenario scenario = load_scenario(scenario_path);
    std::cout << "ok: " << scenario.name << " (" << scenario.agents.size() << " agents, "
              << scenario.rounds << " rounds, digest " << scenario_digest(scenario)
              << ")\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete-round double-auction market simulator"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir = "out", llm_mode = "scripted", endpoint, model;
    std::optional<std::uint64_t> seed;
    auto* run_cmd = app.add_subcommand("run", "Run a scenario");
    run_cmd->add_option("scenario", scenario_path, "Scenario config file")->required();
    run_cmd->add_option("--seed", seed, "Override the scenario seed");
    run_cmd->add_option("--out", out_dir, "Output directory");
    run_cmd->add_option("--llm", llm_mode, "LLM mode: scripted|http");
    run_cmd->add_option("--endpoint", endpoint, "Chat-completions endpoint (http mode)");
    run_cmd->add_option("--model", model, "Model id (http mode)");

    std::string agent_path, grid_spec = "0.1:3.5:0.1", sweep_out = "sweep.csv";
    int trials = 1;
    auto* sweep_cmd = app.add_subcommand("sweep", "Decision sweep over P/F ratios");
    sweep_cmd->add_option("agent", agent_path, "Agent config file")->required();
    sweep_cmd->add_option("--grid", grid_spec, "Ratio grid a:b:step");
    sweep_cmd->add_option("--trials", trials, "Trials per grid point");
    sweep_cmd->add_option("--out", sweep_out, "Output CSV path");

    std::string run_dir;
    auto* report_cmd = app.add_subcommand("report", "Recompute reports from a run dir");
    report_cmd->add_option("run_dir", run_dir, "Run output directory")->required();

    std::string validate_path;
    auto* validate_cmd = app.add_subcommand("validate", "Validate a scenario file");
    validate_cmd->add_option("scenario", validate_path, "Scenario config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed())
            return cmd_run(scenario_path, seed, out_dir, llm_mode, endpoint, model);
        if (sweep_cmd->parsed()) return cmd_sweep(agent_path, grid_spec, trials, sweep_out);
        if (report_cmd->parsed()) return cmd_report(run_dir);
        if (validate_cmd->parsed()) return cmd_validate(validate_path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitConfig;
}
