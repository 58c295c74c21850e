#pragma once

#include <vector>

#include "marketsim/account.hpp"
#include "marketsim/decision.hpp"

namespace marketsim {

struct ValidationResult {
    std::vector<Order> accepted;  // ids and sequence numbers not yet assigned
    std::vector<OrderRejection> rejections;
};

/// Clips a decision's orders to the agent's free resources and reserves the
/// commitments on the account. Sells are clipped to available shares; buys so
/// the cost bound (limit price, or best ask / last price for market orders)
/// fits in available cash. Orders clipped to zero are rejected; malformed
/// orders are rejected whole.
ValidationResult validate_decision(const TradeDecision& decision, AgentAccount& account,
                                   const MarketSnapshot& snapshot);

}  // namespace marketsim
