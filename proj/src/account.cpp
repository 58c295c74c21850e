#include "marketsim/account.hpp"

#include <algorithm>

#include "marketsim/validate.hpp"

namespace marketsim {

Money wealth(const AgentAccount& account, Money price) {
    return account.main_cash + account.dividend_cash + account.shares * price;
}

ValidationResult validate_decision(const TradeDecision& decision, AgentAccount& account,
                                   const MarketSnapshot& snapshot) {
    ValidationResult result;
    for (const auto& req : decision.orders) {
        if (req.quantity <= 0) {
            result.rejections.push_back({req, "non-positive quantity"});
            continue;
        }
        if (req.kind == OrderKind::Limit && (!req.price_limit || *req.price_limit <= 0)) {
            result.rejections.push_back({req, "limit order without a positive price"});
            continue;
        }
        if (req.kind == OrderKind::Market && req.price_limit) {
            result.rejections.push_back({req, "market order with a price limit"});
            continue;
        }

        Order order;
        order.agent_id = account.agent_id;
        order.side = req.side;
        order.kind = req.kind;
        order.price_limit = req.price_limit;

        if (req.side == Side::Sell) {
            const std::int64_t qty = std::min(req.quantity, account.available_shares());
            if (qty <= 0) {
                result.rejections.push_back({req, "insufficient shares"});
                continue;
            }
            order.quantity = order.remaining = qty;
            account.committed_shares += qty;
        } else {
            // Cost per share used to reserve cash. Market buys reserve at the
            // best ask (or last price when the ask side is empty); the
            // difference to the realized fill price is released at settlement.
            Money bound = 0;
            if (req.kind == OrderKind::Limit) {
                bound = *req.price_limit;
            } else {
                bound = snapshot.depth.best_ask ? *snapshot.depth.best_ask
                                                : snapshot.last_price;
            }
            if (bound <= 0) {
                result.rejections.push_back({req, "no price reference for market buy"});
                continue;
            }
            const std::int64_t qty =
                std::min(req.quantity, account.available_cash() / bound);
            if (qty <= 0) {
                result.rejections.push_back({req, "insufficient cash"});
                continue;
            }
            order.quantity = order.remaining = qty;
            const Money reserve = qty * bound;
            account.committed_cash += reserve;
            if (req.kind == OrderKind::Market) order.cash_bound = reserve;
        }
        result.accepted.push_back(order);
    }
    return result;
}

}  // namespace marketsim
