#include "marketsim/ols.hpp"

#include <cmath>
#include <numeric>

namespace marketsim {

OlsFit ols(const std::vector<std::vector<double>>& X, const std::vector<double>& y) {
    const std::size_t n = X.size();
    if (n == 0) throw std::invalid_argument("ols: empty design matrix");
    const std::size_t k = X[0].size();
    if (k == 0) throw std::invalid_argument("ols: design matrix has no columns");
    if (y.size() != n) throw std::invalid_argument("ols: X and y row counts differ");
    if (n < k) throw std::invalid_argument("ols: fewer rows than columns");
    for (const auto& row : X)
        if (row.size() != k) throw std::invalid_argument("ols: ragged design matrix");

    // Householder QR on a working copy A; the reflections are applied to b
    // in place so back-substitution on R solves the least-squares problem.
    std::vector<std::vector<double>> A = X;
    std::vector<double> b = y;

    // Column scale for the rank tolerance.
    double scale = 0.0;
    for (const auto& row : A)
        for (double v : row) scale = std::max(scale, std::fabs(v));
    const double tol = std::max(scale, 1.0) * 1e-12 * static_cast<double>(n);

    std::vector<int> deficient;
    for (std::size_t j = 0; j < k; ++j) {
        double norm = 0.0;
        for (std::size_t i = j; i < n; ++i) norm += A[i][j] * A[i][j];
        norm = std::sqrt(norm);
        if (norm <= tol) {
            deficient.push_back(static_cast<int>(j));
            continue;
        }
        const double alpha = A[j][j] >= 0.0 ? -norm : norm;
        // Householder vector v: v_j = A_jj - alpha, v_i = A_ij below.
        std::vector<double> v(n - j);
        v[0] = A[j][j] - alpha;
        for (std::size_t i = j + 1; i < n; ++i) v[i - j] = A[i][j];
        const double vtv = std::inner_product(v.begin(), v.end(), v.begin(), 0.0);
        if (vtv <= 0.0) {
            deficient.push_back(static_cast<int>(j));
            continue;
        }
        for (std::size_t c = j; c < k; ++c) {
            double dot = 0.0;
            for (std::size_t i = j; i < n; ++i) dot += v[i - j] * A[i][c];
            const double f = 2.0 * dot / vtv;
            for (std::size_t i = j; i < n; ++i) A[i][c] -= f * v[i - j];
        }
        double dot = 0.0;
        for (std::size_t i = j; i < n; ++i) dot += v[i - j] * b[i];
        const double f = 2.0 * dot / vtv;
        for (std::size_t i = j; i < n; ++i) b[i] -= f * v[i - j];
        if (std::fabs(A[j][j]) <= tol) deficient.push_back(static_cast<int>(j));
    }
    if (!deficient.empty()) {
        std::string msg = "ols: rank-deficient design matrix, collinear column(s):";
        for (int c : deficient) msg += " " + std::to_string(c);
        throw RankError(msg, deficient);
    }

    OlsFit fit;
    fit.beta.assign(k, 0.0);
    for (std::size_t jj = k; jj-- > 0;) {
        double s = b[jj];
        for (std::size_t c = jj + 1; c < k; ++c) s -= A[jj][c] * fit.beta[c];
        fit.beta[jj] = s / A[jj][jj];
    }

    fit.residuals.assign(n, 0.0);
    double ssr = 0.0;
    double y_mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double tss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double fitv = 0.0;
        for (std::size_t c = 0; c < k; ++c) fitv += X[i][c] * fit.beta[c];
        fit.residuals[i] = y[i] - fitv;
        ssr += fit.residuals[i] * fit.residuals[i];
        tss += (y[i] - y_mean) * (y[i] - y_mean);
    }
    fit.residual_variance = n > k ? ssr / static_cast<double>(n - k) : 0.0;
    fit.r_squared = tss > 0.0 ? 1.0 - ssr / tss : (ssr <= 1e-300 ? 1.0 : 0.0);
    return fit;
}

}  // namespace marketsim
