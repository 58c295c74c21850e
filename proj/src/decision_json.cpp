#include <cmath>

#include <json.hpp>

#include "marketsim/llm.hpp"

namespace marketsim {

namespace {

using nlohmann::json;

double number_at(const json& j, const std::string& path) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        try {
            std::size_t pos = 0;
            const std::string s = j.get<std::string>();
            double v = std::stod(s, &pos);
            if (pos == s.size()) return v;
        } catch (const std::exception&) {
        }
    }
    throw ParseError(path, "expected a number");
}

std::string string_at(const json& j, const std::string& path) {
    if (!j.is_string()) throw ParseError(path, "expected a string");
    return j.get<std::string>();
}

const json& field(const json& obj, const std::string& key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(path, "missing required field");
    return *it;
}

}  // namespace

TradeDecision parse_decision(const std::string& payload) {
    json j;
    try {
        j = json::parse(payload);
    } catch (const json::parse_error& e) {
        throw ParseError("$", std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("$", "payload is not an object");

    TradeDecision d;
    d.valuation_reasoning = string_at(field(j, "valuation_reasoning", "valuation_reasoning"),
                                      "valuation_reasoning");
    d.valuation = number_at(field(j, "valuation", "valuation"), "valuation");
    if (auto it = j.find("price_target_reasoning"); it != j.end())
        d.price_target_reasoning = string_at(*it, "price_target_reasoning");
    d.price_target = number_at(field(j, "price_target", "price_target"), "price_target");
    d.reasoning = string_at(field(j, "reasoning", "reasoning"), "reasoning");

    const std::string replace =
        string_at(field(j, "replace_decision", "replace_decision"), "replace_decision");
    if (replace == "Add")
        d.replace_decision = ReplaceDecision::Add;
    else if (replace == "Cancel")
        d.replace_decision = ReplaceDecision::Cancel;
    else if (replace == "Replace")
        d.replace_decision = ReplaceDecision::Replace;
    else
        throw ParseError("replace_decision", "must be Add, Cancel, or Replace");

    const json& orders = field(j, "orders", "orders");
    if (!orders.is_array()) throw ParseError("orders", "expected an array");
    for (std::size_t i = 0; i < orders.size(); ++i) {
        const std::string base = "orders[" + std::to_string(i) + "]";
        const json& o = orders[i];
        if (!o.is_object()) throw ParseError(base, "expected an object");
        OrderRequest req;
        const std::string side = string_at(field(o, "decision", base + ".decision"),
                                           base + ".decision");
        if (side == "Buy")
            req.side = Side::Buy;
        else if (side == "Sell")
            req.side = Side::Sell;
        else
            throw ParseError(base + ".decision", "must be Buy or Sell");
        const double qty = number_at(field(o, "quantity", base + ".quantity"),
                                     base + ".quantity");
        if (qty <= 0 || qty != std::floor(qty))
            throw ParseError(base + ".quantity", "must be a positive integer");
        req.quantity = static_cast<std::int64_t>(qty);
        const std::string kind = string_at(field(o, "order_type", base + ".order_type"),
                                           base + ".order_type");
        if (kind == "market")
            req.kind = OrderKind::Market;
        else if (kind == "limit")
            req.kind = OrderKind::Limit;
        else
            throw ParseError(base + ".order_type", "must be market or limit");
        if (req.kind == OrderKind::Limit) {
            auto it = o.find("price_limit");
            if (it == o.end() || it->is_null())
                throw ParseError(base + ".price_limit", "required for limit orders");
            const double px = number_at(*it, base + ".price_limit");
            if (px <= 0) throw ParseError(base + ".price_limit", "must be positive");
            req.price_limit = money_from_double(px);
        }
        d.orders.push_back(req);
    }
    if (d.replace_decision == ReplaceDecision::Cancel && !d.orders.empty())
        throw ParseError("orders", "Cancel requires an empty orders list");
    return d;
}

std::string serialize_decision(const TradeDecision& d) {
    json j;
    j["valuation_reasoning"] = d.valuation_reasoning;
    j["valuation"] = d.valuation;
    j["price_target_reasoning"] = d.price_target_reasoning;
    j["price_target"] = d.price_target;
    json orders = json::array();
    for (const auto& o : d.orders) {
        json jo;
        jo["decision"] = o.side == Side::Buy ? "Buy" : "Sell";
        jo["quantity"] = o.quantity;
        jo["order_type"] = o.kind == OrderKind::Market ? "market" : "limit";
        if (o.price_limit) jo["price_limit"] = money_to_double(*o.price_limit);
        orders.push_back(jo);
    }
    j["orders"] = orders;
    j["replace_decision"] = to_string(d.replace_decision);
    j["reasoning"] = d.reasoning;
    return j.dump();
}

}  // namespace marketsim
