#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

#include "marketsim/llm.hpp"

namespace marketsim {

namespace {

const std::map<std::string, std::string>& system_prompts() {
    static const std::map<std::string, std::string> prompts = {
        {"value",
         "You are a value investor who focuses on fundamental analysis.\n"
         "You believe in mean reversion and try to buy undervalued assets and sell "
         "overvalued ones."},
        {"momentum",
         "You are a momentum trader who focuses on price trends and volume.\n"
         "You believe that 'the trend is your friend' and try to identify and follow "
         "market momentum."},
        {"market_maker",
         "You are a professional market maker who provides liquidity to the market.\n"
         "\n"
         "Your profit comes from capturing the spread between bid and ask prices, not "
         "from directional price movement.\n"
         "\n"
         "IMPORTANT: There is NO SHORT SELLING allowed. You can only sell shares you "
         "already own.\n"
         "\n"
         "Trading Guidelines:\n"
         "- Place LIMIT buy orders slightly below the current market price (1-3%)\n"
         "- Place LIMIT sell orders slightly above the current market price (1-3%)\n"
         "- Your spread should be proportional to volatility but typically 2-6%\n"
         "- NEVER place sell orders more than 10% above the current price\n"
         "- Adjust your spread width based on recent price volatility\n"
         "\n"
         "Inventory Management (No Short Selling):\n"
         "- Monitor your current inventory in the market data\n"
         "- Only place sell orders for quantities you actually own\n"
         "- If you have no inventory, focus on buy orders first\n"
         "- As you acquire inventory, gradually place sell orders\n"
         "- If inventory grows too large, reduce or pause buy orders\n"
         "- Adjust your buy/sell ratio based on current inventory level\n"
         "\n"
         "Example: If price = $100, you might place buy orders at $97-99 and sell "
         "orders at $101-103,\n"
         "but limit your sell quantity to what you currently own.\n"
         "\n"
         "Remember that extreme spreads (e.g., buying at $3 and selling at $30) will "
         "not execute and will lead to losses."},
        {"contrarian",
         "You are a contrarian trader who looks for excessive market moves to trade "
         "against.\n"
         "You believe markets often overreact and try to profit from reversals."},
        {"optimistic",
         "You are an optimistic trader who firmly believes assets are significantly "
         "undervalued.\n"
         "\n"
         "Your Core Beliefs:\n"
         "- The probability of maximum dividends is much higher than stated (80-90%)\n"
         "- The asset is worth far more than the public estimate suggests"},
        {"pessimistic",
         "You are a pessimistic trader who firmly believes assets are significantly "
         "overvalued.\n"
         "\n"
         "Your Core Beliefs:\n"
         "- The probability of minimum dividends is much higher than stated (80-90%)\n"
         "- The asset is worth far less than the public estimate suggests"},
        {"speculator",
         "You are a speculator who tries to profit from market inefficiencies."},
        {"retail", "You are a retail trader."},
        {"hold", "You are a holding agent that never trades."},
    };
    return prompts;
}

std::string pct1(double rate) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", rate * 100.0);
    return buf;
}

std::string dec2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string pct0(double p) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.0f", p * 100.0);
    return buf;
}

}  // namespace

const std::string& system_prompt_for(const std::string& llm_type) {
    auto it = system_prompts().find(llm_type);
    if (it == system_prompts().end())
        throw std::invalid_argument("no system prompt for agent type: " + llm_type);
    return it->second;
}

PromptBundle assemble_prompt(const std::string& llm_type, const MarketSnapshot& s,
                             const AgentAccount& account,
                             const std::vector<Order>& outstanding_orders) {
    std::ostringstream p;

    p << "Market State:\n";
    p << "Last Price: $" << money_to_string(s.last_price) << "\n";
    p << "Round Number: " << s.round << "/"
      << (s.total_rounds ? std::to_string(*s.total_rounds) : std::string("Infinite"))
      << "\n";
    p << "Best Public Estimate of Risk-Neutral Fundamental Value: ";
    if (s.fundamental_estimate)
        p << "$" << money_to_string(*s.fundamental_estimate);
    else
        p << "Unavailable";
    p << "\n";
    p << "Last Trading Volume: " << dec2(static_cast<double>(s.last_volume)) << "\n";
    p << "Price/Fundamental Ratio: ";
    if (s.pf_ratio)
        p << dec2(*s.pf_ratio);
    else
        p << "Unavailable";
    p << "\n\n";

    p << "Market Depth:\n";
    p << "Best Bid: "
      << (s.depth.best_bid ? "$" + money_to_string(*s.depth.best_bid) : std::string("None"))
      << "\n";
    p << "Best Ask: "
      << (s.depth.best_ask ? "$" + money_to_string(*s.depth.best_ask) : std::string("None"))
      << "\n";
    p << "Sell Orders:\n";
    for (auto it = s.depth.ask_levels.rbegin(); it != s.depth.ask_levels.rend(); ++it)
        p << it->shares << " shares @ $" << money_to_string(it->price) << "\n";
    p << "Buy Orders:\n";
    for (const auto& lvl : s.depth.bid_levels)
        p << lvl.shares << " shares @ $" << money_to_string(lvl.price) << "\n";
    p << "\n";

    p << "Your Outstanding Orders:\n";
    bool any = false;
    for (Side side : {Side::Buy, Side::Sell}) {
        bool header = false;
        for (const auto& o : outstanding_orders) {
            if (o.side != side) continue;
            if (!header) {
                p << (side == Side::Buy ? "Buy Orders:\n" : "Sell Orders:\n");
                header = true;
            }
            p << o.remaining << " shares @ $" << money_to_string(o.price_limit.value_or(0))
              << "\n";
            any = true;
        }
    }
    if (!any) p << "None\n";

    p << "Your Position:\n";
    p << "Available Shares: " << account.available_shares()
      << " shares (Short selling is not allowed)\n";
    p << "Main Cash Account: $" << money_to_string(account.available_cash()) << "\n";
    p << "Dividend Cash Account (not available for trading): $"
      << money_to_string(account.dividend_cash) << "\n";
    p << "Total Available Cash: $" << money_to_string(account.available_cash())
      << " (Borrowing is not allowed)\n";
    p << "Shares in Orders: " << account.committed_shares << " shares\n";
    p << "Cash in Orders: $" << money_to_string(account.committed_cash) << "\n\n";

    p << "Price History (last 5 rounds):\n";
    int shown = 0;
    for (const auto& h : s.price_history) {
        if (shown == 5) break;
        p << "Round " << h.round << ": $" << money_to_string(h.price)
          << " (Volume: " << h.volume << ")\n";
        ++shown;
    }
    p << "\n";

    p << "Dividend Information:\n";
    if (s.dividend.last_paid)
        p << "Last Paid Dividend: $" << money_to_string(*s.dividend.last_paid) << "\n";
    p << "Expected Dividend: $" << money_to_string(s.dividend.expected) << "\n";
    p << "Base Dividend: $" << money_to_string(s.dividend.base) << "\n";
    p << "Variation Amount: $" << money_to_string(s.dividend.variation) << "\n";
    p << "Maximum Scenario: $" << money_to_string(s.dividend.base + s.dividend.variation)
      << " with " << pct0(s.dividend.probability_high) << "% probability\n";
    p << "Minimum Scenario: $" << money_to_string(s.dividend.base - s.dividend.variation)
      << " with " << pct0(1.0 - s.dividend.probability_high) << "% probability\n";
    p << "Payment Schedule:\n";
    p << "Next Payment in: " << s.dividend.next_payment_in << " rounds\n";
    p << "Payment Destination: dividend account (non-tradeable)\n";
    p << "Redemption Information:\n";
    if (s.total_rounds)
        p << "Shares will be redeemed at the fundamental value at the end of round "
          << *s.total_rounds << ".\n";
    else
        p << "This market has an infinite time horizon. Shares will not be redeemed.\n";
    p << "Interest Rate Information:\n";
    p << "Base Rate: " << pct1(s.interest_rate) << "%\n";
    p << "Compound Frequency: 1 times per round\n";
    p << "Payment Destination: dividend account (separate from trading)\n\n";

    p << "Your analysis should include:\n";
    p << "valuation_reasoning: Your numerical analysis of the asset's fundamental value\n";
    p << "valuation: Your estimate of the asset's current fundamental value\n";
    p << "price_target_reasoning: Your numerical analysis of the asset's price target\n";
    p << "price_target: Your predicted price for the next round\n";
    p << "reasoning: Your explanation for the trading decision\n\n";

    p << "Trading Options:\n";
    p << "New Orders (replace_decision='Add'):\n";
    p << "Single or multiple orders allowed\n";
    p << "For each order:\n";
    p << "Market order: Set order_type='market'\n";
    p << "Limit order: Set order_type='limit' and specify price_limit\n";
    p << "IMPORTANT: Sell orders require sufficient available shares\n";
    p << "Short selling is NOT allowed\n";
    p << "Cancel Orders (replace_decision='Cancel'):\n";
    p << "Return an empty orders list: orders=[]\n";

    return {system_prompt_for(llm_type), p.str()};
}

}  // namespace marketsim
