#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "marketsim/money.hpp"
#include "marketsim/types.hpp"

namespace marketsim {

/// Cash/share position under no-borrow and no-short constraints.
/// committed_* mirror the agent's open orders: cash reserved by resting and
/// in-flight buys, shares reserved by sells.
struct AgentAccount {
    AgentId agent_id = 0;
    Money main_cash = 0;
    Money dividend_cash = 0;  // non-tradeable; dividends and interest land here
    std::int64_t shares = 0;
    Money committed_cash = 0;
    std::int64_t committed_shares = 0;

    Money available_cash() const { return main_cash - committed_cash; }
    std::int64_t available_shares() const { return shares - committed_shares; }
};

/// Total wealth at a mark price: main cash + dividend cash + share value.
Money wealth(const AgentAccount& account, Money price);

}  // namespace marketsim
