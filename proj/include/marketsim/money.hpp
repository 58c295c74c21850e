#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace marketsim {

/// Currency amount in integer cents. All book prices and account balances
/// use this type so that matching and settlement are exact.
using Money = std::int64_t;

constexpr Money kCentsPerUnit = 100;

inline Money money_from_double(double units) {
    return static_cast<Money>(std::llround(units * 100.0));
}

inline double money_to_double(Money m) { return static_cast<double>(m) / 100.0; }

/// Fixed 2-decimal rendering, e.g. 2800 -> "28.00". Used for prompts and CSV
/// output so digests are stable across platforms.
inline std::string money_to_string(Money m) {
    const bool neg = m < 0;
    const Money a = neg ? -m : m;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%lld.%02lld", neg ? "-" : "",
                  static_cast<long long>(a / 100), static_cast<long long>(a % 100));
    return buf;
}

inline Money money_parse(const std::string& s) {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("bad currency literal: " + s);
    return money_from_double(v);
}

/// Rounds a fractional cent amount to the nearest cent, half away from zero.
inline Money money_round(double cents) { return static_cast<Money>(std::llround(cents)); }

}  // namespace marketsim
