#pragma once

#include <string>

#include "marketsim/analysis.hpp"
#include "marketsim/config.hpp"
#include "marketsim/simulator.hpp"

namespace marketsim {

struct RunInfo {
    std::string llm_mode = "scripted";
    std::string model_id = "scripted";
    std::string started_at;
    std::string finished_at;
};

/// Writes rounds.csv, trades.csv, orders.csv, agents.csv, decisions.jsonl and
/// manifest.json into `out_dir` (created if missing). Currency is serialized
/// as fixed 2-decimal strings so digests are platform-stable.
void write_outputs(const Scenario& scenario, const SimulationResult& result,
                   const std::string& out_dir, const RunInfo& info);

/// Reads the price/fundamental/volume series back from rounds.csv; the
/// post-hoc report reproduces the in-run efficiency numbers exactly from it.
RoundSeries read_rounds_csv(const std::string& path);

/// efficiency.csv + report.txt (human-readable summary) in `out_dir`.
void write_report(const EfficiencyReport& report, const std::string& out_dir);

/// Tidy long-format sweep CSV: agent_type, rho, decision, probability,
/// mean_qty_pct, market_share, mean_valuation, mean_price_target.
void write_sweep_csv(const SweepResult& sweep, const std::string& path);

}  // namespace marketsim
