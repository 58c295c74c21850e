#include "marketsim/analysis.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "marketsim/rng.hpp"

namespace marketsim {

namespace {

constexpr std::uint64_t kSweepPurpose = 0x53574550;  // stream tag: sweep

double population_std(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) /
                        static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(xs.size()));
}

std::string type_label(const AgentMeta& meta) {
    if (meta.type == AgentType::Llm) return "llm_" + meta.llm_type;
    return to_string(meta.type);
}

std::unordered_map<std::string, int> bag_of_words(const std::string& text) {
    std::unordered_map<std::string, int> bag;
    std::string token;
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            token += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        } else if (!token.empty()) {
            ++bag[token];
            token.clear();
        }
    }
    if (!token.empty()) ++bag[token];
    return bag;
}

/// Lag-1 Pearson correlation of a signed-decision series; NA on zero variance.
std::optional<double> lag1_pearson(const std::vector<int>& xs) {
    if (xs.size() < 3) return std::nullopt;
    const std::size_t m = xs.size() - 1;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        mx += xs[i];
        my += xs[i + 1];
    }
    mx /= static_cast<double>(m);
    my /= static_cast<double>(m);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double dx = xs[i] - mx;
        const double dy = xs[i + 1] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
    return sxy / std::sqrt(sxx * syy);
}

double variance_of(const std::vector<int>& xs) {
    if (xs.empty()) return 0.0;
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) /
                        static_cast<double>(xs.size());
    double ss = 0.0;
    for (int x : xs) ss += (x - mean) * (x - mean);
    return ss / static_cast<double>(xs.size());
}

}  // namespace

double cosine_similarity(const std::string& a, const std::string& b) {
    const auto ba = bag_of_words(a);
    const auto bb = bag_of_words(b);
    if (ba.empty() || bb.empty()) return ba.empty() && bb.empty() ? 1.0 : 0.0;
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (const auto& [word, count] : ba) {
        na += static_cast<double>(count) * count;
        auto it = bb.find(word);
        if (it != bb.end()) dot += static_cast<double>(count) * it->second;
    }
    for (const auto& [word, count] : bb) nb += static_cast<double>(count) * count;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

RoundSeries series_from_records(const std::vector<RoundRecord>& records) {
    RoundSeries s;
    for (const auto& r : records) {
        s.prices.push_back(money_to_double(r.clearing_price));
        s.fundamentals.push_back(r.fundamental_value);
        s.volumes.push_back(r.volume);
        s.trade_counts.push_back(r.trade_count);
    }
    return s;
}

EfficiencyReport efficiency(const RoundSeries& series) {
    if (series.prices.size() < 2)
        throw std::invalid_argument("efficiency metrics need at least 2 rounds");
    EfficiencyReport rep;

    rep.has_fundamental =
        series.fundamentals.size() == series.prices.size() &&
        std::all_of(series.fundamentals.begin(), series.fundamentals.end(),
                    [](double v) { return v > 0.0; });
    if (rep.has_fundamental) {
        std::vector<double> ratios;
        for (std::size_t i = 0; i < series.prices.size(); ++i)
            ratios.push_back(series.prices[i] / series.fundamentals[i]);
        rep.ratio_start = ratios.front();
        rep.ratio_end = ratios.back();
        rep.ratio_min = *std::min_element(ratios.begin(), ratios.end());
        rep.ratio_max = *std::max_element(ratios.begin(), ratios.end());
        rep.ratio_std = population_std(ratios);
        for (double r : ratios) rep.mean_abs_deviation += std::fabs(r - 1.0);
        rep.mean_abs_deviation /= static_cast<double>(ratios.size());
    }

    std::vector<double> returns;
    for (std::size_t i = 1; i < series.prices.size(); ++i)
        if (series.prices[i - 1] > 0.0)
            returns.push_back(series.prices[i] / series.prices[i - 1] - 1.0);
    rep.volatility = population_std(returns);

    rep.total_volume = std::accumulate(series.volumes.begin(), series.volumes.end(),
                                       std::int64_t{0});
    rep.total_trades = std::accumulate(series.trade_counts.begin(),
                                       series.trade_counts.end(), std::int64_t{0});
    const double rounds = static_cast<double>(series.prices.size());
    rep.mean_volume = static_cast<double>(rep.total_volume) / rounds;
    rep.trades_per_round = static_cast<double>(rep.total_trades) / rounds;
    rep.avg_trade_size = rep.total_trades > 0 ? static_cast<double>(rep.total_volume) /
                                                    static_cast<double>(rep.total_trades)
                                              : 0.0;
    return rep;
}

EfficiencyReport efficiency(const std::vector<RoundRecord>& records) {
    return efficiency(series_from_records(records));
}

KeywordConfig default_keywords() {
    return {
        {"value", {"fundamental", "overvalued", "undervalued", "ratio"}},
        {"contrarian", {"overreaction", "excessive", "reversal", "sentiment"}},
        {"optimistic", {"upside", "growth", "convergence", "undervalued"}},
    };
}

BehaviorReport behavior(const SimulationResult& result, const KeywordConfig& keywords) {
    std::vector<std::string> all_keywords;
    for (const auto& [group, words] : keywords)
        for (const auto& w : words)
            if (std::find(all_keywords.begin(), all_keywords.end(), w) == all_keywords.end())
                all_keywords.push_back(w);

    struct Acc {
        int agents = 0;
        std::int64_t decisions = 0, buys = 0, sells = 0;
        std::int64_t orders = 0, market_orders = 0, trades = 0;
        double pf_buy_sum = 0.0, pf_sell_sum = 0.0;
        std::int64_t pf_buy_n = 0, pf_sell_n = 0;
        std::map<std::string, std::int64_t> kw;
    };
    std::map<std::string, Acc> by_type;
    std::vector<std::string> agent_type(result.agents.size());
    for (const auto& meta : result.agents) {
        agent_type[static_cast<std::size_t>(meta.agent_id)] = type_label(meta);
        ++by_type[type_label(meta)].agents;
    }

    Money prev_price = result.initial_price;
    for (const auto& rec : result.records) {
        const double pf = rec.fundamental_value > 0.0
                              ? money_to_double(prev_price) / rec.fundamental_value
                              : 0.0;
        for (const auto& d : rec.decisions) {
            auto& acc = by_type[agent_type[static_cast<std::size_t>(d.agent_id)]];
            ++acc.decisions;
            if (d.signed_decision > 0) {
                ++acc.buys;
                if (rec.fundamental_value > 0.0) {
                    acc.pf_buy_sum += pf;
                    ++acc.pf_buy_n;
                }
            } else if (d.signed_decision < 0) {
                ++acc.sells;
                if (rec.fundamental_value > 0.0) {
                    acc.pf_sell_sum += pf;
                    ++acc.pf_sell_n;
                }
            }
            for (const auto& o : d.decision.orders) {
                ++acc.orders;
                if (o.kind == OrderKind::Market) ++acc.market_orders;
            }
            const auto bag = bag_of_words(d.decision.valuation_reasoning + " " +
                                          d.decision.reasoning);
            for (const auto& w : all_keywords) {
                auto it = bag.find(w);
                if (it != bag.end()) acc.kw[w] += it->second;
            }
        }
        for (const auto& t : rec.trades) {
            ++by_type[agent_type[static_cast<std::size_t>(t.buyer_agent)]].trades;
            ++by_type[agent_type[static_cast<std::size_t>(t.seller_agent)]].trades;
        }
        prev_price = rec.clearing_price;
    }

    BehaviorReport rep;
    const double rounds = static_cast<double>(result.records.size());
    for (const auto& [type, acc] : by_type) {
        TypeBehavior tb;
        tb.type = type;
        tb.agents = acc.agents;
        tb.decision_count = acc.decisions;
        if (acc.decisions > 0) {
            tb.buy_ratio = static_cast<double>(acc.buys) / static_cast<double>(acc.decisions);
            tb.sell_ratio =
                static_cast<double>(acc.sells) / static_cast<double>(acc.decisions);
        }
        if (acc.orders > 0)
            tb.market_share =
                static_cast<double>(acc.market_orders) / static_cast<double>(acc.orders);
        if (rounds > 0) tb.trades_per_round = static_cast<double>(acc.trades) / rounds;
        tb.keyword_counts = acc.kw;
        if (acc.pf_buy_n > 0)
            tb.mean_pf_at_buy = acc.pf_buy_sum / static_cast<double>(acc.pf_buy_n);
        if (acc.pf_sell_n > 0)
            tb.mean_pf_at_sell = acc.pf_sell_sum / static_cast<double>(acc.pf_sell_n);
        rep.types.push_back(std::move(tb));
    }
    return rep;
}

ConsistencyReport consistency_metrics(const SimulationResult& result) {
    std::vector<std::string> agent_type(result.agents.size());
    for (const auto& meta : result.agents)
        agent_type[static_cast<std::size_t>(meta.agent_id)] = type_label(meta);

    std::map<std::string, std::vector<std::string>> texts;
    std::map<AgentId, std::vector<int>> signs;
    for (const auto& rec : result.records)
        for (const auto& d : rec.decisions) {
            texts[agent_type[static_cast<std::size_t>(d.agent_id)]].push_back(
                d.decision.reasoning);
            signs[d.agent_id].push_back(d.signed_decision);
        }

    ConsistencyReport rep;
    for (const auto& [type, rs] : texts) {
        if (rs.size() < 2) {
            rep.sc[type] = 1.0;
            continue;
        }
        double total = 0.0;
        std::int64_t pairs = 0;
        for (std::size_t i = 0; i < rs.size(); ++i)
            for (std::size_t j = i + 1; j < rs.size(); ++j) {
                total += cosine_similarity(rs[i], rs[j]);
                ++pairs;
            }
        rep.sc[type] = total / static_cast<double>(pairs);
    }
    std::map<std::string, std::pair<double, int>> dc_acc;
    for (const auto& [agent, xs] : signs) {
        const auto& type = agent_type[static_cast<std::size_t>(agent)];
        if (!dc_acc.count(type)) dc_acc[type] = {0.0, 0};
        if (auto c = lag1_pearson(xs)) {
            dc_acc[type].first += *c;
            dc_acc[type].second += 1;
        }
    }
    for (const auto& [type, acc] : dc_acc)
        rep.dc[type] = acc.second > 0
                           ? std::optional<double>(acc.first / acc.second)
                           : std::nullopt;
    return rep;
}

VarianceCheck decision_variance(const SimulationResult& result) {
    std::vector<std::string> agent_type(result.agents.size());
    for (const auto& meta : result.agents)
        agent_type[static_cast<std::size_t>(meta.agent_id)] = type_label(meta);
    std::vector<int> pooled;
    std::map<std::string, std::vector<int>> within;
    for (const auto& rec : result.records)
        for (const auto& d : rec.decisions) {
            pooled.push_back(d.signed_decision);
            within[agent_type[static_cast<std::size_t>(d.agent_id)]].push_back(
                d.signed_decision);
        }
    VarianceCheck check;
    check.pooled = variance_of(pooled);
    for (const auto& [type, xs] : within) check.within[type] = variance_of(xs);
    return check;
}

SweepResult decision_sweep(const AgentConfig& agent, const std::vector<double>& grid,
                           int trials, const SweepConfig& config) {
    if (agent.type == AgentType::Llm)
        throw std::invalid_argument("decision sweep supports rule agents only");
    if (trials <= 0) throw std::invalid_argument("sweep needs trials > 0");
    for (double rho : grid)
        if (rho <= 0.0) throw std::invalid_argument("sweep grid values must be positive");

    AgentConfig cfg = agent;
    if (cfg.params.target_inventory < 0) cfg.params.target_inventory = config.base_shares;

    SweepResult result;
    for (std::size_t cell_idx = 0; cell_idx < grid.size(); ++cell_idx) {
        const double rho = grid[cell_idx];
        const Money price = money_round(rho * static_cast<double>(config.fundamental));

        MarketSnapshot snap;
        snap.last_price = price;
        snap.round = 1;
        snap.fundamental_estimate = config.fundamental;
        snap.pf_ratio =
            static_cast<double>(price) / static_cast<double>(config.fundamental);
        for (int lvl = 1; lvl <= config.book_levels; ++lvl) {
            const double off = config.book_level_step * lvl;
            snap.depth.bid_levels.push_back(
                {money_round(static_cast<double>(price) * (1.0 - off)),
                 config.book_level_shares});
            snap.depth.ask_levels.push_back(
                {money_round(static_cast<double>(price) * (1.0 + off)),
                 config.book_level_shares});
        }
        if (!snap.depth.bid_levels.empty()) {
            snap.depth.best_bid = snap.depth.bid_levels.front().price;
            snap.depth.best_ask = snap.depth.ask_levels.front().price;
        }
        for (int i = 0; i < 5; ++i) snap.price_history.push_back({0, price, 0});
        snap.dividend.expected = 140;
        snap.dividend.base = 140;
        snap.dividend.variation = 100;
        snap.interest_rate = 0.05;

        SweepCell cell;
        cell.agent_type = to_string(cfg.type);
        cell.rho = rho;
        std::int64_t buys = 0, sells = 0, holds = 0, orders = 0, market_orders = 0;
        double qty_pct_sum = 0.0, valuation_sum = 0.0, target_sum = 0.0;
        for (int trial = 0; trial < trials; ++trial) {
            AgentAccount account;
            account.agent_id = 0;
            account.main_cash = config.base_cash;
            account.shares = config.base_shares;
            auto rng = make_rng(config.seed, cell_idx, static_cast<std::uint64_t>(trial),
                                kSweepPurpose);
            const TradeDecision d =
                cfg.use_linear ? linear_decide(cfg.type, cfg.params, cfg.linear, snap,
                                               account, NewsSignal{}, rng)
                               : strategy_decide(cfg.type, cfg.params, snap, account,
                                                 NewsSignal{}, rng);
            std::int64_t net = 0, total_qty = 0;
            for (const auto& o : d.orders) {
                net += o.side == Side::Buy ? o.quantity : -o.quantity;
                total_qty += o.quantity;
                ++orders;
                if (o.kind == OrderKind::Market) ++market_orders;
            }
            if (net > 0)
                ++buys;
            else if (net < 0)
                ++sells;
            else
                ++holds;
            qty_pct_sum += 100.0 * static_cast<double>(total_qty) /
                           static_cast<double>(config.base_shares);
            valuation_sum += d.valuation;
            target_sum += d.price_target;
        }
        const double n = static_cast<double>(trials);
        cell.p_buy = static_cast<double>(buys) / n;
        cell.p_sell = static_cast<double>(sells) / n;
        cell.p_hold = static_cast<double>(holds) / n;
        cell.mean_qty_pct = qty_pct_sum / n;
        cell.market_share =
            orders > 0 ? static_cast<double>(market_orders) / static_cast<double>(orders)
                       : 0.0;
        cell.mean_valuation = valuation_sum / n;
        cell.mean_price_target = target_sum / n;
        result.cells.push_back(cell);
    }
    return result;
}

WealthReport wealth_report(const SimulationResult& result) {
    std::vector<std::string> agent_type(result.agents.size());
    for (const auto& meta : result.agents)
        agent_type[static_cast<std::size_t>(meta.agent_id)] = type_label(meta);

    WealthReport rep;
    std::map<std::string, double> start_total, start_trading;
    auto emit = [&](int round, const std::vector<AgentAccount>& accounts, Money price) {
        std::map<std::string, std::pair<double, double>> by_type;  // total, trading
        for (const auto& a : accounts) {
            const double trading = money_to_double(a.main_cash + a.shares * price);
            const double total = trading + money_to_double(a.dividend_cash);
            auto& acc = by_type[agent_type[static_cast<std::size_t>(a.agent_id)]];
            acc.first += total;
            acc.second += trading;
        }
        for (const auto& [type, w] : by_type)
            rep.points.push_back({round, type, w.first, w.second});
        return by_type;
    };

    const auto start = emit(0, result.initial_accounts, result.initial_price);
    for (const auto& [type, w] : start) {
        start_total[type] = w.first;
        start_trading[type] = w.second;
    }
    std::map<std::string, std::pair<double, double>> last = start;
    for (const auto& rec : result.records)
        last = emit(rec.round, rec.accounts, rec.clearing_price);
    for (const auto& [type, w] : last) {
        rep.total_growth_pct[type] =
            start_total[type] > 0.0 ? 100.0 * (w.first / start_total[type] - 1.0) : 0.0;
        rep.trading_growth_pct[type] =
            start_trading[type] > 0.0 ? 100.0 * (w.second / start_trading[type] - 1.0)
                                      : 0.0;
    }
    return rep;
}

}  // namespace marketsim
