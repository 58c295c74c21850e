#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace marketsim {

/// X has linearly dependent columns; `columns` names the offenders.
struct RankError : std::runtime_error {
    std::vector<int> columns;
    RankError(std::string what, std::vector<int> cols)
        : std::runtime_error(std::move(what)), columns(std::move(cols)) {}
};

struct OlsFit {
    std::vector<double> beta;
    std::vector<double> residuals;
    double residual_variance = 0.0;  // SSR / (n - k), 0 when n == k
    double r_squared = 0.0;
};

/// Least squares via Householder QR (no normal equations). X is row-major:
/// X[i] is observation i. Requires rows >= columns and full column rank.
OlsFit ols(const std::vector<std::vector<double>>& X, const std::vector<double>& y);

}  // namespace marketsim
