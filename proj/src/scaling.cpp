// SPDX-License-Identifier: Apache-2.0
#include "thinkbudget/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "least_squares.hpp"
#include "thinkbudget/errors.hpp"

namespace thinkbudget {
namespace {

constexpr std::array<const char*, 3> kScalingRegressors = {"ln(T_b+1)", "ln(M_s)", "intercept"};

bool all_equal(const std::vector<double>& xs) {
    return std::all_of(xs.begin(), xs.end(), [&](double x) { return x == xs.front(); });
}

} // namespace

ScalingFit fit_scaling_law(std::span<const ScalingObservation> observations) {
    const std::size_t n = observations.size();
    std::vector<double> log_t(n), log_m(n), y(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& o = observations[i];
        if (!(o.thinking_tokens >= 0.0) || !std::isfinite(o.thinking_tokens)) {
            throw DomainError("scaling fit: thinking tokens must be finite and >= 0");
        }
        if (!(o.model_size > 0.0)) throw DomainError("scaling fit: model size must be positive");
        if (!(o.weight > 0.0)) throw DomainError("scaling fit: weights must be positive");
        log_t[i] = std::log(o.thinking_tokens + 1.0);
        log_m[i] = std::log(o.model_size);
        y[i] = o.accuracy;
        w[i] = o.weight;
    }
    if (n == 0) throw DegenerateFitError("scaling fit: no points", kScalingRegressors[0]);
    if (all_equal(log_t)) {
        throw DegenerateFitError("scaling fit: every point has the same budget, ln(T_b+1) is collinear with the intercept",
                                 kScalingRegressors[0]);
    }
    if (all_equal(log_m)) {
        throw DegenerateFitError("scaling fit: every point has the same model size, ln(M_s) is collinear with the intercept",
                                 kScalingRegressors[1]);
    }
    if (n < 3) throw DegenerateFitError("scaling fit: needs at least 3 points for 3 parameters", kScalingRegressors[2]);

    // Normalise weights to mean 1 so sigma stays in accuracy units.
    const double mean_w = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(n);
    for (auto& wi : w) wi /= mean_w;

    detail::Design design{n, 3, std::vector<double>(n * 3)};
    for (std::size_t i = 0; i < n; ++i) {
        design.at(i, 0) = log_t[i];
        design.at(i, 1) = log_m[i];
        design.at(i, 2) = 1.0;
    }
    auto outcome = detail::weighted_least_squares(std::move(design), y, w);
    if (!outcome.result) {
        const std::string name = kScalingRegressors[outcome.dependent_column];
        throw DegenerateFitError("scaling fit: design is rank deficient, " + name + " is collinear with earlier regressors",
                                 name);
    }
    const auto& r = *outcome.result;
    ScalingFit fit;
    fit.alpha = r.coef[0];
    fit.beta = r.coef[1];
    fit.gamma = r.coef[2];
    fit.n_points = n;
    fit.sigma = n > 3 ? std::sqrt(r.rss / static_cast<double>(n - 3)) : 0.0;
    for (std::size_t j = 0; j < 3; ++j) fit.std_error[j] = fit.sigma * std::sqrt(r.inverse_normal[j * 3 + j]);
    return fit;
}

ScalingFit fit_scaling_law(std::span<const AccuracyPoint> points, FitWeighting weighting) {
    std::vector<ScalingObservation> rows;
    rows.reserve(points.size());
    for (const auto& p : points) {
        p.validate();
        if (p.budget.is_unlimited()) {
            throw DomainError("scaling fit: unlimited budget must be mapped to observed thinking tokens before fitting");
        }
        rows.push_back(ScalingObservation{static_cast<double>(*p.budget.limit()), p.model_size, p.accuracy,
                                          weighting == FitWeighting::TrialCount ? static_cast<double>(p.n) : 1.0});
    }
    return fit_scaling_law(std::span<const ScalingObservation>(rows));
}

std::vector<ScalingObservation> scaling_observations(std::span<const AccuracySummary> summaries,
                                                     const std::map<std::string, double>& sizes,
                                                     FitWeighting weighting) {
    std::vector<ScalingObservation> rows;
    rows.reserve(summaries.size());
    for (const auto& s : summaries) {
        auto it = sizes.find(s.model);
        if (it == sizes.end()) throw DomainError("scaling fit: no model size known for '" + s.model + "'");
        const double tokens =
            s.budget.is_unlimited() ? s.mean_thinking_tokens : static_cast<double>(*s.budget.limit());
        rows.push_back(ScalingObservation{tokens, it->second, s.accuracy,
                                          weighting == FitWeighting::TrialCount ? static_cast<double>(s.n) : 1.0});
    }
    return rows;
}

Prediction predict_accuracy(const ScalingFit& fit, double thinking_tokens, double model_size) {
    if (!(thinking_tokens >= 0.0)) throw DomainError("predict_accuracy: thinking tokens must be >= 0");
    if (!(model_size > 0.0)) throw DomainError("predict_accuracy: model size must be positive");
    const double raw = fit.alpha * std::log(thinking_tokens + 1.0) + fit.beta * std::log(model_size) + fit.gamma;
    const double value = std::clamp(raw, 0.0, 1.0);
    return Prediction{value, value != raw};
}

double marginal_utility(double alpha, double thinking_tokens) {
    if (!(thinking_tokens >= 0.0)) throw DomainError("marginal_utility: thinking tokens must be >= 0");
    return alpha / (thinking_tokens + 1.0);
}

std::uint64_t saturation_budget(double alpha, double epsilon) {
    if (!(alpha > 0.0) || !(epsilon > 0.0)) throw DomainError("saturation_budget: alpha and epsilon must be positive");
    const double bound = alpha / epsilon - 1.0;
    if (!std::isfinite(bound) || bound >= 9.0e15) throw DomainError("saturation_budget: alpha/epsilon too large");
    // Closed form is T = floor(bound) + 1; settle rounding with the predicate itself.
    std::uint64_t t = bound < 0.0 ? 0 : static_cast<std::uint64_t>(std::floor(bound)) + 1;
    auto below = [&](std::uint64_t x) { return alpha / (static_cast<double>(x) + 1.0) < epsilon; };
    while (t > 0 && below(t - 1)) --t;
    while (!below(t)) ++t;
    return t;
}

double efficiency(double delta_accuracy, double thinking_tokens) {
    if (!(thinking_tokens > 0.0)) throw DomainError("efficiency: thinking tokens must be positive");
    return delta_accuracy / thinking_tokens;
}

std::string_view to_string(Regime regime) {
    switch (regime) {
    case Regime::HighEfficiency: return "HighEfficiency";
    case Regime::Balanced: return "Balanced";
    case Regime::HighAccuracy: break;
    }
    return "HighAccuracy";
}

Regime classify_efficiency(double efficiency) {
    if (!(efficiency >= 0.0)) throw DomainError("classify_efficiency: efficiency must be >= 0");
    if (efficiency > kHighEfficiencyThreshold) return Regime::HighEfficiency;
    if (efficiency > kHighAccuracyThreshold) return Regime::Balanced;
    return Regime::HighAccuracy;
}

std::uint64_t regime_onset(double alpha, Regime regime) {
    if (!(alpha > 0.0)) throw DomainError("regime_onset: alpha must be positive");
    if (regime == Regime::HighEfficiency) return 0;
    const double threshold = regime == Regime::Balanced ? kHighEfficiencyThreshold : kHighAccuracyThreshold;
    auto reached = [&](std::uint64_t t) {
        return static_cast<int>(classify_efficiency(marginal_utility(alpha, static_cast<double>(t)))) >=
               static_cast<int>(regime);
    };
    const double bound = alpha / threshold - 1.0;
    if (bound >= 9.0e15) throw DomainError("regime_onset: alpha/threshold too large");
    std::uint64_t t = bound <= 0.0 ? 0 : static_cast<std::uint64_t>(std::ceil(bound));
    while (t > 0 && reached(t - 1)) --t;
    while (!reached(t)) ++t;
    return t;
}

Regime regime_for_budget(const BudgetSpec& budget) {
    if (budget.is_unlimited()) return Regime::HighAccuracy;
    const auto tokens = *budget.limit();
    if (tokens < 256) return Regime::HighEfficiency;
    if (tokens < 512) return Regime::Balanced;
    return Regime::HighAccuracy;
}

std::vector<BudgetAccuracy> pareto_frontier(std::span<const BudgetAccuracy> points) {
    std::vector<BudgetAccuracy> sorted(points.begin(), points.end());
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.tokens < b.tokens; });
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i].tokens == sorted[i - 1].tokens) throw DomainError("pareto_frontier: budgets must be distinct");
    }
    std::vector<BudgetAccuracy> frontier;
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& p : sorted) {
        if (p.accuracy > best) {
            frontier.push_back(p);
            best = p.accuracy;
        }
    }
    return frontier;
}

void CostModel::validate() const {
    if (!(c0 >= 0.0) || !(c1 >= 0.0)) throw DomainError("cost model: c0 and c1 must be >= 0");
    if (!(c_max > 0.0)) throw DomainError("cost model: c_max must be positive");
    if (c0 > c_max) throw DomainError("cost model: fixed overhead c0 exceeds c_max");
}

BudgetAccuracy optimal_budget(std::span<const BudgetAccuracy> points, const CostModel& cost) {
    cost.validate();
    if (points.empty()) throw DomainError("optimal_budget: no points");
    const BudgetAccuracy* best = nullptr;
    double cheapest = std::numeric_limits<double>::infinity();
    for (const auto& p : points) {
        const double c = cost.cost(p.tokens);
        cheapest = std::min(cheapest, c);
        if (c > cost.c_max) continue;
        if (best == nullptr || p.accuracy > best->accuracy ||
            (p.accuracy == best->accuracy && p.tokens < best->tokens)) {
            best = &p;
        }
    }
    if (best == nullptr) {
        throw InfeasibleError("optimal_budget: no budget fits c_max=" + std::to_string(cost.c_max) +
                                  "; cheapest cost is " + std::to_string(cheapest),
                              cheapest);
    }
    return *best;
}

double truncation_loss(std::span<const double> density, std::span<const double> value, double t_b, double t_full) {
    if (density.size() != value.size()) throw DomainError("truncation_loss: density and value sample counts differ");
    if (density.size() < 2) throw DomainError("truncation_loss: need at least 2 samples");
    if (!(t_full >= 0.0) || !(t_b >= 0.0) || t_b > t_full) {
        throw DomainError("truncation_loss: need 0 <= t_b <= t_full");
    }
    std::vector<double> f(density.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!(density[i] >= 0.0) || !(value[i] >= 0.0)) throw DomainError("truncation_loss: samples must be >= 0");
        f[i] = density[i] * value[i];
    }
    if (t_full == 0.0 || t_b == t_full) return 0.0;

    const std::size_t cells = f.size() - 1;
    const double h = t_full / static_cast<double>(cells);
    const auto first = std::min(cells - 1, static_cast<std::size_t>(std::floor(t_b / h)));
    const double x_next = h * static_cast<double>(first + 1);
    const double frac = (t_b - h * static_cast<double>(first)) / h;
    const double f_at_tb = f[first] + frac * (f[first + 1] - f[first]);

    double total = 0.5 * (f_at_tb + f[first + 1]) * (x_next - t_b);
    for (std::size_t i = first + 1; i < cells; ++i) total += 0.5 * (f[i] + f[i + 1]) * h;
    return std::max(0.0, total);
}

BudgetRange allocate_budget(double complexity) {
    if (!(complexity >= 0.0 && complexity <= 1.0)) throw DomainError("allocate_budget: complexity must lie in [0,1]");
    if (complexity < 0.3) return {BudgetSpec::tokens(64), BudgetSpec::tokens(128)};
    if (complexity <= 0.7) return {BudgetSpec::tokens(256), BudgetSpec::tokens(512)};
    return {BudgetSpec::tokens(1024), BudgetSpec::unlimited()};
}

} // namespace thinkbudget
