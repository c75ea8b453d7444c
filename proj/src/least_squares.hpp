// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace thinkbudget::detail {

/// Column-major design matrix with `cols` columns of `rows` entries.
struct Design {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    double& at(std::size_t r, std::size_t c) { return data[c * rows + r]; }
    double at(std::size_t r, std::size_t c) const { return data[c * rows + r]; }
};

struct LeastSquaresResult {
    std::vector<double> coef;
    /// Sum of squared (already weighted) residuals.
    double rss = 0.0;
    /// (A^T A)^-1 of the weighted design.
    std::vector<double> inverse_normal;
};

/// Householder QR solve of min ||sqrt(w) (A x - y)||. Returns the index of
/// the first numerically dependent column instead of a solution when the
/// design is rank deficient.
struct LeastSquaresOutcome {
    std::optional<LeastSquaresResult> result;
    std::size_t dependent_column = 0;
};

LeastSquaresOutcome weighted_least_squares(Design design, std::vector<double> y, const std::vector<double>& weights);

} // namespace thinkbudget::detail
