// Python bindings for the simulator's main operations: scenario loading,
// running simulations, efficiency/consistency analysis, decision sweeps,
// OLS, the fundamental-value formula, and structured-decision parsing.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "marketsim/analysis.hpp"
#include "marketsim/config.hpp"
#include "marketsim/llm.hpp"
#include "marketsim/ols.hpp"
#include "marketsim/simulator.hpp"

namespace py = pybind11;
using namespace marketsim;

namespace {

double money_units(Money m) { return money_to_double(m); }

py::object opt_money(const std::optional<Money>& m) {
    if (!m) return py::none();
    return py::float_(money_units(*m));
}

py::dict round_dict(const RoundRecord& r) {
    py::dict d;
    d["round"] = r.round;
    d["clearing_price"] = money_units(r.clearing_price);
    d["fundamental_value"] = r.fundamental_value;
    d["volume"] = r.volume;
    d["trades"] = r.trade_count;
    d["best_bid"] = opt_money(r.best_bid);
    d["best_ask"] = opt_money(r.best_ask);
    d["dividend_paid"] = opt_money(r.dividend_paid);
    return d;
}

py::dict efficiency_dict(const EfficiencyReport& e) {
    py::dict d;
    d["has_fundamental"] = e.has_fundamental;
    d["ratio_start"] = e.ratio_start;
    d["ratio_end"] = e.ratio_end;
    d["ratio_min"] = e.ratio_min;
    d["ratio_max"] = e.ratio_max;
    d["ratio_std"] = e.ratio_std;
    d["mean_abs_deviation"] = e.mean_abs_deviation;
    d["volatility"] = e.volatility;
    d["mean_volume"] = e.mean_volume;
    d["trades_per_round"] = e.trades_per_round;
    d["avg_trade_size"] = e.avg_trade_size;
    d["total_volume"] = e.total_volume;
    d["total_trades"] = e.total_trades;
    return d;
}

py::dict decision_dict(const TradeDecision& t) {
    py::dict d;
    d["valuation"] = t.valuation;
    d["valuation_reasoning"] = t.valuation_reasoning;
    d["price_target"] = t.price_target;
    d["price_target_reasoning"] = t.price_target_reasoning;
    d["replace_decision"] = std::string(to_string(t.replace_decision));
    d["reasoning"] = t.reasoning;
    py::list orders;
    for (const auto& o : t.orders) {
        py::dict od;
        od["side"] = o.side == Side::Buy ? "buy" : "sell";
        od["quantity"] = o.quantity;
        od["kind"] = o.kind == OrderKind::Market ? "market" : "limit";
        od["price_limit"] = opt_money(o.price_limit);
        orders.append(od);
    }
    d["orders"] = orders;
    return d;
}

AgentConfig agent_config_from(const std::string& type, double cash_multiplier,
                              double shares_multiplier) {
    AgentConfig c;
    c.type = agent_type_from_string(type);
    c.cash_multiplier = cash_multiplier;
    c.shares_multiplier = shares_multiplier;
    return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Discrete-round double-auction market simulator";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<RankError>(m, "RankError", PyExc_ValueError);

    py::class_<Scenario>(m, "Scenario")
        .def_readwrite("name", &Scenario::name)
        .def_readwrite("rounds", &Scenario::rounds)
        .def_readwrite("seed", &Scenario::seed)
        .def_readwrite("interest_rate", &Scenario::interest_rate)
        .def_property(
            "initial_price", [](const Scenario& s) { return money_units(s.initial_price); },
            [](Scenario& s, double v) { s.initial_price = money_from_double(v); })
        .def_property_readonly("horizon",
                               [](const Scenario& s) {
                                   return s.horizon == HorizonKind::Infinite
                                              ? "infinite"
                                              : "finite";
                               })
        .def_property_readonly("agent_types",
                               [](const Scenario& s) {
                                   std::vector<std::string> out;
                                   for (const auto& a : s.agents)
                                       out.emplace_back(to_string(a.type));
                                   return out;
                               })
        .def("digest", [](const Scenario& s) { return scenario_digest(s); })
        .def("__repr__", [](const Scenario& s) {
            return "<Scenario '" + s.name + "', " + std::to_string(s.rounds) +
                   " rounds, " + std::to_string(s.agents.size()) + " agents>";
        });

    py::class_<SimulationResult>(m, "SimulationResult")
        .def_property_readonly("initial_price",
                               [](const SimulationResult& r) {
                                   return money_units(r.initial_price);
                               })
        .def_property_readonly("final_price",
                               [](const SimulationResult& r) {
                                   return r.records.empty()
                                              ? money_units(r.initial_price)
                                              : money_units(r.records.back().clearing_price);
                               })
        .def("rounds",
             [](const SimulationResult& r) {
                 py::list out;
                 for (const auto& rec : r.records) out.append(round_dict(rec));
                 return out;
             })
        .def("agents",
             [](const SimulationResult& r) {
                 py::list out;
                 for (const auto& a : r.agents) {
                     py::dict d;
                     d["agent_id"] = a.agent_id;
                     d["type"] = std::string(to_string(a.type));
                     if (!a.llm_type.empty()) d["llm_type"] = a.llm_type;
                     out.append(d);
                 }
                 return out;
             })
        .def("efficiency",
             [](const SimulationResult& r) { return efficiency_dict(efficiency(r.records)); })
        .def("decision_variance",
             [](const SimulationResult& r) {
                 const auto v = decision_variance(r);
                 py::dict d;
                 d["pooled"] = v.pooled;
                 d["within"] = v.within;
                 return d;
             })
        .def("__repr__", [](const SimulationResult& r) {
            return "<SimulationResult " + std::to_string(r.records.size()) + " rounds, " +
                   std::to_string(r.agents.size()) + " agents>";
        });

    m.def("load_scenario", &load_scenario, py::arg("path"),
          "Load and validate a scenario JSON file.");
    m.def("parse_scenario", &parse_scenario, py::arg("json_text"),
          "Parse and validate a scenario from a JSON string.");
    m.def(
        "run",
        [](const Scenario& s, std::optional<std::uint64_t> seed) {
            Scenario copy = s;
            if (seed) copy.seed = *seed;
            return marketsim::run(copy);
        },
        py::arg("scenario"), py::arg("seed") = py::none(),
        "Run a scenario deterministically; `seed` overrides the scenario seed.");

    m.def(
        "fundamental_value",
        [](double expected_dividend, double interest_rate, int round,
           std::optional<int> horizon_rounds, double redemption_value) {
            MarketParams p;
            p.expected_dividend = expected_dividend;
            p.interest_rate = interest_rate;
            if (horizon_rounds) {
                p.horizon = HorizonKind::Finite;
                p.horizon_rounds = *horizon_rounds;
                p.redemption_value = redemption_value;
            }
            return fundamental_value(p, round);
        },
        py::arg("expected_dividend"), py::arg("interest_rate"), py::arg("round") = 1,
        py::arg("horizon_rounds") = py::none(), py::arg("redemption_value") = 0.0,
        "Present value of the remaining dividend stream (perpetuity when no "
        "horizon is given, discounted sum plus redemption otherwise).");

    m.def(
        "decision_sweep",
        [](const std::string& agent_type, const std::vector<double>& grid, int trials,
           double cash_multiplier, double shares_multiplier) {
            const auto sweep = decision_sweep(
                agent_config_from(agent_type, cash_multiplier, shares_multiplier), grid,
                trials);
            py::list out;
            for (const auto& c : sweep.cells) {
                py::dict d;
                d["agent_type"] = c.agent_type;
                d["rho"] = c.rho;
                d["p_buy"] = c.p_buy;
                d["p_sell"] = c.p_sell;
                d["p_hold"] = c.p_hold;
                d["mean_qty_pct"] = c.mean_qty_pct;
                d["market_share"] = c.market_share;
                out.append(d);
            }
            return out;
        },
        py::arg("agent_type"), py::arg("grid"), py::arg("trials") = 25,
        py::arg("cash_multiplier") = 1.0, py::arg("shares_multiplier") = 1.0,
        "Tabulate a rule agent's decisions on a grid of price/value ratios.");

    m.def(
        "ols",
        [](const std::vector<std::vector<double>>& X, const std::vector<double>& y) {
            const auto fit = marketsim::ols(X, y);
            py::dict d;
            d["beta"] = fit.beta;
            d["residual_variance"] = fit.residual_variance;
            d["r_squared"] = fit.r_squared;
            return d;
        },
        py::arg("X"), py::arg("y"),
        "Least squares via Householder QR; X is a list of observation rows.");

    m.def(
        "parse_decision",
        [](const std::string& payload) { return decision_dict(parse_decision(payload)); },
        py::arg("payload"),
        "Strictly validate a structured trade-decision payload into a dict.");

    m.def("cosine_similarity", &cosine_similarity, py::arg("a"), py::arg("b"),
          "Bag-of-words cosine similarity between two reasoning texts.");
}
