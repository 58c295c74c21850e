#include "marketsim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "marketsim/rng.hpp"
#include "marketsim/validate.hpp"

namespace marketsim {

namespace {

constexpr std::uint64_t kShufflePurpose = 0x53485546;   // stream tag: shuffle
constexpr std::uint64_t kDividendPurpose = 0x44495644;  // stream tag: dividend
constexpr std::uint64_t kDecidePurpose = 0x44454349;    // stream tag: decide

constexpr int kMaxParseAttempts = 3;

std::string fnv1a_hex(const std::string& a, const std::string& b) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const std::string* s : {&a, &b})
        for (unsigned char c : *s) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

TradeDecision hold_fallback(const std::string& why) {
    TradeDecision d;
    d.replace_decision = ReplaceDecision::Add;
    d.reasoning = why;
    return d;
}

int sign_of_requests(const TradeDecision& d) {
    std::int64_t net = 0;
    for (const auto& o : d.orders) net += o.side == Side::Buy ? o.quantity : -o.quantity;
    return net > 0 ? 1 : net < 0 ? -1 : 0;
}

std::vector<Order> orders_of_agent(const OrderBook& book, AgentId agent) {
    std::vector<Order> out;
    for (const auto& o : book.all_orders())
        if (o.agent_id == agent) out.push_back(o);
    return out;
}

void release_commitments(AgentAccount& account, const std::vector<Order>& resting) {
    for (const auto& o : resting) {
        if (o.side == Side::Buy)
            account.committed_cash -= o.remaining * o.price_limit.value_or(0);
        else
            account.committed_shares -= o.remaining;
    }
}

void recompute_commitments(const OrderBook& book, std::vector<AgentAccount>& accounts) {
    for (auto& a : accounts) {
        a.committed_cash = 0;
        a.committed_shares = 0;
    }
    for (const auto& o : book.all_orders()) {
        auto& a = accounts[static_cast<std::size_t>(o.agent_id)];
        if (o.side == Side::Buy)
            a.committed_cash += o.remaining * o.price_limit.value_or(0);
        else
            a.committed_shares += o.remaining;
    }
}

}  // namespace

MarketParams Scenario::market_params() const {
    MarketParams p;
    p.interest_rate = interest_rate;
    p.horizon = horizon;
    p.horizon_rounds = rounds;
    p.redemption_value = redemption_value;
    p.expected_dividend = money_to_double(dividend.expected());
    return p;
}

std::vector<AgentId> seeded_shuffle(std::vector<AgentId> agent_ids, std::uint64_t seed,
                                    int round) {
    auto rng = make_rng(seed, static_cast<std::uint64_t>(round), 0, kShufflePurpose);
    // Fisher-Yates with explicit draws so the permutation is identical on
    // every platform (std::shuffle's draw pattern is not pinned down).
    for (std::size_t i = agent_ids.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(agent_ids[i - 1], agent_ids[j]);
    }
    return agent_ids;
}

SimulationResult run(const Scenario& scenario, LlmClient* client) {
    if (scenario.agents.empty()) throw std::invalid_argument("scenario has no agents");
    if (scenario.rounds <= 0) throw std::invalid_argument("scenario needs rounds > 0");
    if (scenario.dividend.payment_interval <= 0)
        throw std::invalid_argument("dividend payment interval must be positive");

    const MarketParams params = scenario.market_params();
    const int n = static_cast<int>(scenario.agents.size());

    // Endowments.
    std::vector<AgentAccount> accounts(static_cast<std::size_t>(n));
    std::vector<AgentConfig> configs = scenario.agents;
    for (int i = 0; i < n; ++i) {
        auto& a = accounts[static_cast<std::size_t>(i)];
        a.agent_id = i;
        a.main_cash = money_round(static_cast<double>(scenario.base_cash) *
                                  configs[static_cast<std::size_t>(i)].cash_multiplier);
        a.shares = std::llround(static_cast<double>(scenario.base_shares) *
                                configs[static_cast<std::size_t>(i)].shares_multiplier);
        if (configs[static_cast<std::size_t>(i)].params.target_inventory < 0)
            configs[static_cast<std::size_t>(i)].params.target_inventory = a.shares;
    }

    SimulationResult result;
    result.initial_accounts = accounts;
    result.initial_price = scenario.initial_price;
    for (int i = 0; i < n; ++i)
        result.agents.push_back({i, configs[static_cast<std::size_t>(i)].type,
                                 configs[static_cast<std::size_t>(i)].llm_type});

    // Scripted fallback client built from the scenario's queued payloads.
    ScriptedClient scripted;
    if (!client) {
        for (int i = 0; i < n; ++i)
            for (const auto& payload : configs[static_cast<std::size_t>(i)].scripted_payloads)
                scripted.queue(i, payload);
        client = &scripted;
    }

    OrderBook book;
    Money prev_price = scenario.initial_price;
    std::int64_t prev_volume = 0;
    std::optional<Money> last_dividend;
    std::vector<PriceHistoryEntry> history = {{0, scenario.initial_price, 0}};
    OrderId next_order_id = 1;
    std::int64_t next_trade_id = 1;

    std::vector<AgentId> ids(static_cast<std::size_t>(n));
    std::iota(ids.begin(), ids.end(), 0);

    const Money total_shares0 =
        std::accumulate(accounts.begin(), accounts.end(), std::int64_t{0},
                        [](std::int64_t s, const AgentAccount& a) { return s + a.shares; });

    for (int r = 1; r <= scenario.rounds; ++r) {
        RoundRecord rec;
        rec.round = r;
        rec.fundamental_value = fundamental_value(params, r);

        // Shared market view, start of round.
        MarketSnapshot base;
        base.last_price = prev_price;
        base.round = r;
        if (scenario.horizon == HorizonKind::Finite) base.total_rounds = scenario.rounds;
        base.last_volume = prev_volume;
        base.depth = book.depth();
        base.price_history.assign(history.begin(),
                                  history.begin() + std::min<std::size_t>(history.size(), 5));
        base.dividend.last_paid = last_dividend;
        base.dividend.expected = scenario.dividend.expected();
        base.dividend.base = scenario.dividend.base;
        base.dividend.variation = scenario.dividend.variation;
        base.dividend.probability_high = scenario.dividend.probability_high;
        base.dividend.next_payment_in =
            scenario.dividend.payment_interval - (r - 1) % scenario.dividend.payment_interval;
        base.interest_rate = scenario.interest_rate;

        const Money fv_money = fundamental_value_money(params, r);
        const NewsSignal news{r - 1 < static_cast<int>(scenario.news.size())
                                  ? scenario.news[static_cast<std::size_t>(r - 1)]
                                  : 0.0};

        // Decisions, fixed agent order; each agent sees the same snapshot.
        std::vector<TradeDecision> decisions(static_cast<std::size_t>(n));
        rec.decisions.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const auto& cfg = configs[static_cast<std::size_t>(i)];
            MarketSnapshot snap = base;
            if (!scenario.hide_fundamental && !cfg.hide_fundamental) {
                snap.fundamental_estimate = fv_money;
                snap.pf_ratio = static_cast<double>(prev_price) / static_cast<double>(fv_money);
            }
            auto& drec = rec.decisions[static_cast<std::size_t>(i)];
            drec.agent_id = i;

            if (cfg.type == AgentType::Llm) {
                const PromptBundle bundle = assemble_prompt(
                    cfg.llm_type, snap, accounts[static_cast<std::size_t>(i)],
                    orders_of_agent(book, i));
                drec.prompt_hash = fnv1a_hex(bundle.system_prompt, bundle.user_prompt);
                bool decided = false;
                for (int attempt = 1; attempt <= kMaxParseAttempts && !decided; ++attempt) {
                    RawCompletion raw;
                    try {
                        raw = client->complete(bundle, i, r);
                    } catch (const TransportError& e) {
                        rec.anomalies.push_back("agent " + std::to_string(i) +
                                                ": transport failure, holding: " + e.what());
                        break;
                    } catch (const ScriptError&) {
                        if (attempt == 1) throw;  // misconfigured script, not model noise
                        rec.anomalies.push_back("agent " + std::to_string(i) +
                                                ": script exhausted during parse retry");
                        break;
                    }
                    drec.raw_payload = raw.text;
                    try {
                        decisions[static_cast<std::size_t>(i)] = parse_decision(raw.text);
                        decided = true;
                    } catch (const ParseError& e) {
                        rec.anomalies.push_back("agent " + std::to_string(i) +
                                                " round " + std::to_string(r) +
                                                " parse attempt " + std::to_string(attempt) +
                                                ": " + e.what());
                    }
                }
                if (!decided)
                    decisions[static_cast<std::size_t>(i)] =
                        hold_fallback("holding after malformed model output");
            } else {
                auto rng = make_rng(scenario.seed, static_cast<std::uint64_t>(r),
                                    static_cast<std::uint64_t>(i), kDecidePurpose);
                decisions[static_cast<std::size_t>(i)] =
                    cfg.use_linear
                        ? linear_decide(cfg.type, cfg.params, cfg.linear, snap,
                                        accounts[static_cast<std::size_t>(i)], news, rng)
                        : strategy_decide(cfg.type, cfg.params, snap,
                                          accounts[static_cast<std::size_t>(i)], news, rng);
            }
            drec.decision = decisions[static_cast<std::size_t>(i)];
            drec.signed_decision = sign_of_requests(decisions[static_cast<std::size_t>(i)]);
        }

        // Validation with replace semantics: a Cancel/Replace frees the
        // agent's resting commitments before the new orders are sized.
        std::vector<std::vector<Order>> accepted(static_cast<std::size_t>(n));
        std::vector<std::vector<OrderId>> agent_cancels(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            auto& account = accounts[static_cast<std::size_t>(i)];
            const auto& decision = decisions[static_cast<std::size_t>(i)];
            auto& drec = rec.decisions[static_cast<std::size_t>(i)];

            if (decision.replace_decision != ReplaceDecision::Add) {
                const auto resting = orders_of_agent(book, i);
                release_commitments(account, resting);
                for (const auto& o : resting)
                    agent_cancels[static_cast<std::size_t>(i)].push_back(o.id);
            }
            MarketSnapshot snap = base;  // validation needs depth + last price only
            auto vr = validate_decision(decision, account, snap);
            accepted[static_cast<std::size_t>(i)] = std::move(vr.accepted);
            drec.rejections = std::move(vr.rejections);
            if (!drec.rejections.empty())
                drec.validation_outcome =
                    accepted[static_cast<std::size_t>(i)].empty() ? "rejected" : "partial";
        }

        // Random submission order; sequence numbers follow the permutation.
        const auto perm = seeded_shuffle(ids, scenario.seed, r);
        std::vector<OrderId> cancels;
        std::vector<Order> new_orders;
        std::int64_t sequence = 1;
        for (AgentId agent : perm) {
            for (OrderId id : agent_cancels[static_cast<std::size_t>(agent)])
                cancels.push_back(id);
            for (auto& o : accepted[static_cast<std::size_t>(agent)]) {
                o.id = next_order_id++;
                o.round_submitted = r;
                o.sequence = sequence++;
                new_orders.push_back(o);
                rec.order_events.push_back({r, o.id, o.agent_id, o.side, o.kind, o.quantity,
                                            o.price_limit, "placed"});
            }
        }

        const Money cash_before = std::accumulate(
            accounts.begin(), accounts.end(), Money{0},
            [](Money s, const AgentAccount& a) { return s + a.main_cash; });

        auto round_result =
            run_round(book, cancels, std::move(new_orders), prev_price, r, next_trade_id);

        // Settlement: exact cash and share transfer per trade.
        for (const auto& t : round_result.trades) {
            auto& buyer = accounts[static_cast<std::size_t>(t.buyer_agent)];
            auto& seller = accounts[static_cast<std::size_t>(t.seller_agent)];
            const Money notional = t.price * t.quantity;
            buyer.main_cash -= notional;
            seller.main_cash += notional;
            buyer.shares += t.quantity;
            seller.shares -= t.quantity;
        }
        recompute_commitments(book, accounts);

        for (const auto& o : round_result.cancelled)
            rec.order_events.push_back({r, o.id, o.agent_id, o.side, o.kind, o.quantity,
                                        o.price_limit, "cancelled"});
        for (const auto& o : round_result.converted_orders)
            rec.order_events.push_back({r, o.id, o.agent_id, o.side, OrderKind::Limit,
                                        o.remaining, o.price_limit, "converted"});
        for (const auto& o : round_result.unexecuted)
            rec.order_events.push_back({r, o.id, o.agent_id, o.side, o.kind, o.remaining,
                                        o.price_limit, "unexecuted"});

        // Engine invariants: cash and shares conserve exactly; the no-borrow
        // and no-short constraints hold for every account.
        const Money cash_after = std::accumulate(
            accounts.begin(), accounts.end(), Money{0},
            [](Money s, const AgentAccount& a) { return s + a.main_cash; });
        const std::int64_t shares_after = std::accumulate(
            accounts.begin(), accounts.end(), std::int64_t{0},
            [](std::int64_t s, const AgentAccount& a) { return s + a.shares; });
        if (cash_after != cash_before)
            throw SimulationInvariantError(
                "cash conservation violated in round " + std::to_string(r) + ": " +
                money_to_string(cash_before) + " -> " + money_to_string(cash_after));
        if (shares_after != total_shares0)
            throw SimulationInvariantError("share conservation violated in round " +
                                           std::to_string(r));
        for (const auto& a : accounts)
            if (a.available_cash() < 0 || a.available_shares() < 0 || a.shares < 0)
                throw SimulationInvariantError(
                    "solvency violated for agent " + std::to_string(a.agent_id) +
                    " in round " + std::to_string(r));

        // Dividends and interest accrue after trading.
        if (r % scenario.dividend.payment_interval == 0) {
            auto rng = make_rng(scenario.seed, static_cast<std::uint64_t>(r), 0,
                                kDividendPurpose);
            const Money paid = pay_dividend(scenario.dividend, rng, accounts);
            last_dividend = paid;
            rec.dividend_paid = paid;
        }
        accrue_interest(scenario.interest_rate, accounts);

        // Redemption after the terminal round of a finite horizon.
        if (scenario.horizon == HorizonKind::Finite && r == scenario.rounds) {
            const Money k = money_from_double(scenario.redemption_value);
            for (const auto& o : book.all_orders()) book.cancel(o.id);
            recompute_commitments(book, accounts);
            for (auto& a : accounts) {
                a.main_cash += a.shares * k;
                a.shares = 0;
            }
        }

        rec.clearing_price = round_result.clearing_price;
        rec.volume = round_result.volume;
        rec.trade_count = static_cast<std::int64_t>(round_result.trades.size());
        rec.trades = std::move(round_result.trades);
        rec.best_bid = book.best_bid();
        rec.best_ask = book.best_ask();
        rec.accounts = accounts;
        result.records.push_back(std::move(rec));

        history.insert(history.begin(), {r, round_result.clearing_price, round_result.volume});
        if (history.size() > 5) history.resize(5);
        prev_price = round_result.clearing_price;
        prev_volume = round_result.volume;
    }

    return result;
}

}  // namespace marketsim
