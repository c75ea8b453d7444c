// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <set>

#include "least_squares.hpp"
#include "thinkbudget/errors.hpp"
#include "thinkbudget/scaling.hpp"

namespace thinkbudget {
namespace {

struct Profile {
    double t0 = 1.0;
    double rss = std::numeric_limits<double>::infinity();
    std::vector<double> coef;
};

// ln L = a ln N + b ln(T_b + T_0) + c, solved for fixed T_0.
Profile profile_at(std::span<const LossLawPoint> points, double t0) {
    const std::size_t n = points.size();
    detail::Design design{n, 3, std::vector<double>(n * 3)};
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        design.at(i, 0) = std::log(points[i].n_params);
        design.at(i, 1) = std::log(points[i].thinking_tokens + t0);
        design.at(i, 2) = 1.0;
        y[i] = std::log(points[i].loss);
    }
    auto outcome = detail::weighted_least_squares(std::move(design), std::move(y), std::vector<double>(n, 1.0));
    Profile p;
    p.t0 = t0;
    if (outcome.result) {
        p.rss = outcome.result->rss;
        p.coef = outcome.result->coef;
    }
    return p;
}

} // namespace

double LossLawFit::log_predict(double n_params, double thinking_tokens) const {
    return log_scale - alpha_n * std::log(n_params) - alpha_t * std::log(thinking_tokens + t0);
}

double LossLawFit::predict(double n_params, double thinking_tokens) const {
    return std::exp(log_predict(n_params, thinking_tokens));
}

LossLawFit fit_loss_law(std::span<const LossLawPoint> points, const LossLawOptions& options) {
    if (points.size() < 5) throw DomainError("loss law fit: needs at least 5 points");
    std::set<double> sizes, budgets;
    for (const auto& p : points) {
        if (!(p.loss > 0.0)) throw DomainError("loss law fit: losses must be positive");
        if (!(p.n_params > 0.0)) throw DomainError("loss law fit: parameter counts must be positive");
        if (!(p.thinking_tokens >= 0.0)) throw DomainError("loss law fit: thinking tokens must be >= 0");
        sizes.insert(p.n_params);
        budgets.insert(p.thinking_tokens);
    }
    if (sizes.size() < 2) throw DomainError("loss law fit: needs at least 2 distinct parameter counts");
    if (budgets.size() < 2) throw DomainError("loss law fit: needs at least 2 distinct thinking budgets");
    if (!(options.t0_min > 0.0) || !(options.t0_max > options.t0_min) || options.grid_points < 2) {
        throw DomainError("loss law fit: grid needs 0 < t0_min < t0_max and at least 2 points");
    }

    const double log_lo = std::log(options.t0_min);
    const double log_hi = std::log(options.t0_max);
    const double step = (log_hi - log_lo) / static_cast<double>(options.grid_points - 1);
    std::vector<Profile> grid;
    grid.reserve(static_cast<std::size_t>(options.grid_points));
    for (int i = 0; i < options.grid_points; ++i) {
        grid.push_back(profile_at(points, std::exp(log_lo + step * i)));
    }
    const auto best_it = std::min_element(grid.begin(), grid.end(), [](const auto& a, const auto& b) { return a.rss < b.rss; });
    if (!std::isfinite(best_it->rss)) throw DomainError("loss law fit: design is rank deficient at every T_0");
    const auto best_index = static_cast<std::size_t>(best_it - grid.begin());
    Profile best = *best_it;

    std::optional<std::string> warning;
    const bool flat = std::all_of(grid.begin(), grid.end(),
                                  [&](const auto& g) { return std::abs(g.rss - best.rss) <= 1e-14 * (1.0 + best.rss); });
    if (flat) {
        warning = "T_0 grid exhausted without improvement: residual is flat in T_0";
    } else if (best_index == 0 || best_index + 1 == grid.size()) {
        warning = "T_0 minimiser sits on the grid boundary; the optimum may lie outside [t0_min, t0_max]";
    }

    if (options.refine && !flat) {
        // Golden-section search in ln T_0 over the neighbouring grid cells.
        double a = log_lo + step * static_cast<double>(best_index == 0 ? 0 : best_index - 1);
        double b = log_lo + step * static_cast<double>(std::min(best_index + 1, grid.size() - 1));
        const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
        double x1 = b - ratio * (b - a);
        double x2 = a + ratio * (b - a);
        Profile p1 = profile_at(points, std::exp(x1));
        Profile p2 = profile_at(points, std::exp(x2));
        for (int iter = 0; iter < 200 && (b - a) > 1e-13; ++iter) {
            if (p1.rss <= p2.rss) {
                b = x2;
                x2 = x1;
                p2 = std::move(p1);
                x1 = b - ratio * (b - a);
                p1 = profile_at(points, std::exp(x1));
            } else {
                a = x1;
                x1 = x2;
                p1 = std::move(p2);
                x2 = a + ratio * (b - a);
                p2 = profile_at(points, std::exp(x2));
            }
        }
        const Profile& polished = p1.rss <= p2.rss ? p1 : p2;
        if (polished.rss < best.rss) best = polished;
    }

    LossLawFit fit;
    fit.t0 = best.t0;
    fit.alpha_n = -best.coef[0];
    fit.alpha_t = -best.coef[1];
    fit.log_scale = best.coef[2];
    fit.log_rss = best.rss;
    if (fit.alpha_n > 0.0) {
        fit.t_c = 1.0;
        fit.n_c = std::exp(fit.log_scale / fit.alpha_n);
    } else if (fit.alpha_t > 0.0) {
        fit.n_c = 1.0;
        fit.t_c = std::exp(fit.log_scale / fit.alpha_t);
    }
    if (fit.alpha_n < 0.0 || fit.alpha_t < 0.0) {
        const std::string note = "fitted exponent is negative (alpha_n=" + std::to_string(fit.alpha_n) +
                                 ", alpha_t=" + std::to_string(fit.alpha_t) + ")";
        warning = warning ? *warning + "; " + note : note;
    }
    fit.warning = std::move(warning);
    return fit;
}

} // namespace thinkbudget
