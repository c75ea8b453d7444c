// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "thinkbudget/budget.hpp"
#include "thinkbudget/domain.hpp"
#include "thinkbudget/runner.hpp"

namespace thinkbudget {

// ---------------------------------------------------------------------------
// Log scaling law: accuracy = alpha*ln(T_b+1) + beta*ln(M_s) + gamma + eps.
// Natural logarithms throughout.
// ---------------------------------------------------------------------------

/// One regression row. Unlike AccuracyPoint the budget is a real token
/// count, so unlimited conditions can enter at their observed mean length.
struct ScalingObservation {
    double thinking_tokens = 0.0;
    double model_size = 1.0;
    double accuracy = 0.0;
    double weight = 1.0;
};

struct ScalingFit {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    /// Weighted residual standard deviation (N - 3 degrees of freedom).
    double sigma = 0.0;
    std::size_t n_points = 0;
    /// Standard errors of alpha, beta, gamma.
    std::array<double, 3> std_error{};
};

enum class FitWeighting { TrialCount, Uniform };

/// Weighted least squares on [ln(t+1), ln(M_s), 1]. Throws
/// DegenerateFitError naming the collinear regressor when the design is
/// rank deficient (including fewer than 3 points).
ScalingFit fit_scaling_law(std::span<const ScalingObservation> observations);

/// AccuracyPoint front end; weights are trial counts unless Uniform is
/// requested. Unlimited budgets are rejected with DomainError: map them to
/// observed thinking tokens first (see scaling_observations).
ScalingFit fit_scaling_law(std::span<const AccuracyPoint> points, FitWeighting weighting = FitWeighting::TrialCount);

/// Converts runner summaries into regression rows. Unlimited rows use the
/// observed mean thinking tokens; model sizes come from `sizes` by model
/// name (DomainError when missing).
std::vector<ScalingObservation> scaling_observations(std::span<const AccuracySummary> summaries,
                                                     const std::map<std::string, double>& sizes,
                                                     FitWeighting weighting = FitWeighting::TrialCount);

struct Prediction {
    double value = 0.0;
    bool clamped = false;
};

/// Law value clamped to [0,1]; `clamped` reports whether clamping happened.
Prediction predict_accuracy(const ScalingFit& fit, double thinking_tokens, double model_size);

/// d accuracy / d T_b = alpha / (T_b + 1).
double marginal_utility(double alpha, double thinking_tokens);

/// Smallest integer T >= 0 with alpha / (T + 1) < epsilon.
std::uint64_t saturation_budget(double alpha, double epsilon);

/// Empirical efficiency E(T_b) = delta accuracy / T_b (T_b > 0).
double efficiency(double delta_accuracy, double thinking_tokens);

// ---------------------------------------------------------------------------
// Efficiency regimes.
// ---------------------------------------------------------------------------

enum class Regime { HighEfficiency, Balanced, HighAccuracy };

std::string_view to_string(Regime regime);

inline constexpr double kHighEfficiencyThreshold = 3e-4;
inline constexpr double kHighAccuracyThreshold = 1e-4;

/// e > 3e-4 HighEfficiency; 1e-4 < e <= 3e-4 Balanced; e <= 1e-4 HighAccuracy.
Regime classify_efficiency(double efficiency);

/// Smallest integer budget T whose marginal utility alpha / (T + 1) falls
/// in `regime` or a later one. HighEfficiency always starts at 0.
std::uint64_t regime_onset(double alpha, Regime regime);

/// [0,256) HighEfficiency; [256,512) Balanced; >= 512 and Unlimited HighAccuracy.
Regime regime_for_budget(const BudgetSpec& budget);

// ---------------------------------------------------------------------------
// Frontier and cost-constrained choice.
// ---------------------------------------------------------------------------

struct BudgetAccuracy {
    double tokens = 0.0;
    double accuracy = 0.0;

    bool operator==(const BudgetAccuracy&) const = default;
};

/// Points with no cheaper budget of equal or better accuracy, by budget
/// ascending. Throws DomainError on repeated budgets.
std::vector<BudgetAccuracy> pareto_frontier(std::span<const BudgetAccuracy> points);

/// Linear cost C(T_b) = c0 + c1 * T_b under a cap c_max.
struct CostModel {
    double c0 = 0.0;
    double c1 = 0.0;
    double c_max = 1.0;

    double cost(double tokens) const noexcept { return c0 + c1 * tokens; }
    void validate() const;
};

/// Most accurate point with cost <= c_max; ties go to the smaller budget.
/// Throws InfeasibleError carrying the cheapest available cost.
BudgetAccuracy optimal_budget(std::span<const BudgetAccuracy> points, const CostModel& cost);

// ---------------------------------------------------------------------------
// Truncation loss: integral over [t_b, t_full] of p(t) * v(t).
// ---------------------------------------------------------------------------

/// p and v are samples on a uniform grid spanning [0, t_full] (same length,
/// at least 2). The product is integrated with the trapezoidal rule; a t_b
/// between grid nodes is handled by linear interpolation.
double truncation_loss(std::span<const double> density, std::span<const double> value, double t_b, double t_full);

// ---------------------------------------------------------------------------
// Joint loss law L(N, T_b) = (N_c/N)^alpha_N * (T_c/(T_b+T_0))^alpha_T.
// ---------------------------------------------------------------------------

struct LossLawPoint {
    double n_params = 1.0;
    double thinking_tokens = 0.0;
    double loss = 1.0;
};

/// Only the product N_c^alpha_N * T_c^alpha_T is identifiable; it is kept
/// as `log_scale`. The split reported in n_c / t_c fixes t_c = 1 (or n_c = 1
/// when alpha_n is 0).
struct LossLawFit {
    double n_c = 1.0;
    double alpha_n = 0.0;
    double t_c = 1.0;
    double alpha_t = 0.0;
    double t0 = 1.0;
    double log_scale = 0.0;
    /// Sum of squared residuals of ln L.
    double log_rss = 0.0;
    std::optional<std::string> warning;

    double log_predict(double n_params, double thinking_tokens) const;
    double predict(double n_params, double thinking_tokens) const;
};

struct LossLawOptions {
    double t0_min = 1.0;
    double t0_max = 4096.0;
    int grid_points = 64;
    /// Golden-section polish around the best grid node.
    bool refine = true;
};

/// Profiles T_0 over a log-spaced grid; at each T_0 the remaining
/// parameters come from a linear solve of
///   ln L = alpha_N (ln N_c - ln N) + alpha_T (ln T_c - ln(T_b + T_0)).
/// Needs >= 5 points spanning >= 2 distinct N and >= 2 distinct T_b with
/// positive losses (DomainError otherwise).
LossLawFit fit_loss_law(std::span<const LossLawPoint> points, const LossLawOptions& options = {});

// ---------------------------------------------------------------------------
// Dynamic allocation by complexity score.
// ---------------------------------------------------------------------------

struct BudgetRange {
    BudgetSpec low;
    BudgetSpec high;

    /// Scalar pick inside the range: its lower end.
    BudgetSpec recommended() const noexcept { return low; }
    bool operator==(const BudgetRange&) const = default;
};

/// < 0.3 -> [64,128]; 0.3..0.7 -> [256,512]; > 0.7 -> [1024, inf].
BudgetRange allocate_budget(double complexity);

} // namespace thinkbudget
