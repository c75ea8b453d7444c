// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "thinkbudget/config.hpp"
#include "thinkbudget/gateway.hpp"
#include "thinkbudget/runner.hpp"
#include "thinkbudget/scaling.hpp"

namespace thinkbudget {

// Files written into RunConfig::output_dir.
inline constexpr std::string_view kTracesFile = "traces.jsonl";
inline constexpr std::string_view kPromptsFile = "prompts.jsonl";
inline constexpr std::string_view kRecordsFile = "records.jsonl";
inline constexpr std::string_view kSummaryFile = "summary.csv";
inline constexpr std::string_view kFitFile = "fit.json";
inline constexpr std::string_view kFrontierFile = "frontier.csv";
inline constexpr std::string_view kCurvesFile = "curves.csv";

struct PipelineOptions {
    /// Replace existing outputs instead of refusing.
    bool force = false;
    /// Transport for http(s) endpoints; a real HttpTransport when null.
    std::shared_ptr<Transport> transport;
    Sleeper sleep = real_sleep;
    /// Progress messages; silent when null.
    std::ostream* log = nullptr;
};

/// Stage 1: one unconstrained trace per (model, question) into traces.jsonl.
/// Returns the number of traces written.
std::size_t run_generate(const RunConfig& config, const PipelineOptions& options);

/// Stage 2 inspection: the reconstructed prompt for every (model, question,
/// budget) into prompts.jsonl, optionally narrowed to one question or budget.
std::size_t run_truncate(const RunConfig& config, const PipelineOptions& options,
                         const std::optional<std::string>& question_id = std::nullopt,
                         const std::optional<BudgetSpec>& budget = std::nullopt);

struct EvaluateOutcome {
    std::size_t records = 0;
    /// Records whose model call failed.
    std::size_t failures = 0;
};

/// Stage 3: the full matrix into records.jsonl plus summary.csv.
EvaluateOutcome run_evaluate(const RunConfig& config, const PipelineOptions& options);

struct AnalyzeOptions {
    FitWeighting weighting = FitWeighting::TrialCount;
    /// Thresholds at which saturation budgets are reported.
    std::vector<double> saturation_epsilons = {1e-4, 3e-4};
    std::optional<CostModel> cost;
    /// Also fit the joint loss law to 1 - accuracy.
    bool loss_law = false;
};

struct DatasetFit {
    std::string dataset_id;
    ScalingFit fit;
};

/// Scaling fit per dataset, frontiers per (model, dataset) and optional
/// cost-constrained picks, read from records.jsonl. Writes fit.json and
/// frontier.csv. A degenerate design raises DegenerateFitError.
std::vector<DatasetFit> run_analyze(const RunConfig& config, const PipelineOptions& options,
                                    const AnalyzeOptions& analyze = {});

/// Writes the plot-ready curves.csv and report.txt from records.jsonl,
/// using fit.json when present. Returns the accuracy table written to report.txt.
std::string run_report(const RunConfig& config, const PipelineOptions& options);

struct SimulateOptions {
    std::filesystem::path output_dir = "sim-out";
    std::size_t questions = 200;
    std::uint64_t seed = 7;
    std::vector<double> sizes = {1.7, 4.0, 8.0};
    double alpha = 0.08;
    double beta = 0.12;
    double gamma = 0.05;
    double noise_sigma = 0.02;
    RunMode mode = RunMode::Truncation;
    int parallelism = 1;
    std::vector<BudgetSpec> budgets = budget_ladder();
};

struct SimulateOutcome {
    std::filesystem::path config_path;
    EvaluateOutcome evaluation;
    std::vector<DatasetFit> fits;
};

/// Synthetic end to end run: writes a question set and a config using
/// sim:// endpoints into the output directory, then runs generate (in
/// Truncation mode), evaluate and analyze against it.
SimulateOutcome run_simulate(const SimulateOptions& simulate, const PipelineOptions& options);

} // namespace thinkbudget
