// SPDX-License-Identifier: Apache-2.0
#include "least_squares.hpp"

#include <cmath>

namespace thinkbudget::detail {
namespace {

constexpr double kRankTolerance = 1e-10;

} // namespace

LeastSquaresOutcome weighted_least_squares(Design a, std::vector<double> y, const std::vector<double>& weights) {
    const std::size_t n = a.rows;
    const std::size_t p = a.cols;
    for (std::size_t i = 0; i < n; ++i) {
        const double s = std::sqrt(weights[i]);
        y[i] *= s;
        for (std::size_t c = 0; c < p; ++c) a.at(i, c) *= s;
    }
    if (n < p) return {std::nullopt, n};

    std::vector<double> column_norm(p, 0.0);
    for (std::size_t c = 0; c < p; ++c) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += a.at(i, c) * a.at(i, c);
        column_norm[c] = std::sqrt(s);
    }

    std::vector<double> v(n);
    for (std::size_t k = 0; k < p; ++k) {
        double norm = 0.0;
        for (std::size_t i = k; i < n; ++i) norm += a.at(i, k) * a.at(i, k);
        norm = std::sqrt(norm);
        if (norm <= kRankTolerance * column_norm[k] || norm == 0.0) return {std::nullopt, k};

        const double alpha = a.at(k, k) > 0.0 ? -norm : norm;
        for (std::size_t i = k; i < n; ++i) v[i] = a.at(i, k);
        v[k] -= alpha;
        double vnorm2 = 0.0;
        for (std::size_t i = k; i < n; ++i) vnorm2 += v[i] * v[i];

        if (vnorm2 > 0.0) {
            for (std::size_t c = k; c < p; ++c) {
                double dot = 0.0;
                for (std::size_t i = k; i < n; ++i) dot += v[i] * a.at(i, c);
                const double f = 2.0 * dot / vnorm2;
                for (std::size_t i = k; i < n; ++i) a.at(i, c) -= f * v[i];
            }
            double dot = 0.0;
            for (std::size_t i = k; i < n; ++i) dot += v[i] * y[i];
            const double f = 2.0 * dot / vnorm2;
            for (std::size_t i = k; i < n; ++i) y[i] -= f * v[i];
        }
    }

    LeastSquaresResult out;
    out.coef.assign(p, 0.0);
    for (std::size_t k = p; k-- > 0;) {
        double s = y[k];
        for (std::size_t c = k + 1; c < p; ++c) s -= a.at(k, c) * out.coef[c];
        out.coef[k] = s / a.at(k, k);
    }
    for (std::size_t i = p; i < n; ++i) out.rss += y[i] * y[i];

    // R^-1 by back substitution, then R^-1 R^-T.
    std::vector<double> rinv(p * p, 0.0);
    for (std::size_t col = 0; col < p; ++col) {
        for (std::size_t k = p; k-- > 0;) {
            double s = (k == col) ? 1.0 : 0.0;
            for (std::size_t c = k + 1; c < p; ++c) s -= a.at(k, c) * rinv[c * p + col];
            rinv[k * p + col] = s / a.at(k, k);
        }
    }
    out.inverse_normal.assign(p * p, 0.0);
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < p; ++k) s += rinv[i * p + k] * rinv[j * p + k];
            out.inverse_normal[i * p + j] = s;
        }
    }
    return {std::move(out), 0};
}

} // namespace thinkbudget::detail
