// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "thinkbudget/backend.hpp"
#include "thinkbudget/budget.hpp"
#include "thinkbudget/domain.hpp"
#include "thinkbudget/tokenizer.hpp"
#include "thinkbudget/truncation.hpp"

namespace thinkbudget {

/// Pulls the letters of the LAST answer declaration out of a response:
/// "answer is X", "Answer: X" or a line holding only a letter list such as
/// "B,C". Letters are filtered to `allowed`; no declaration gives {}.
LetterSet extract_answer(std::string_view answer_text, LetterSet allowed);

/// Exact set match.
bool score(LetterSet extracted, LetterSet truth);

enum class RunMode { Native, Truncation };

std::string_view to_string(RunMode mode);
RunMode parse_run_mode(std::string_view text);

struct RunPlan {
    std::string run_id;
    std::vector<ModelSpec> models;
    std::vector<std::string> datasets;
    std::vector<BudgetSpec> budgets;
    RunMode mode = RunMode::Truncation;
    int parallelism = 1;
    std::uint64_t seed = 0;
    /// Native mode only: also embed the truncated Stage-1 thinking in the
    /// prompt next to the API budget parameter.
    bool native_reconstructs_prompt = false;

    void validate() const;
};

using QuestionSets = std::map<std::string, std::vector<QuestionRecord>>;
/// Stage-1 traces keyed by (model name, question id).
using TraceStore = std::map<std::pair<std::string, std::string>, ReasoningTrace>;

struct RunContext {
    std::function<ModelBackend&(const ModelSpec&)> backend_for;
    Tokenizer tokenizer = Tokenizer::whitespace();
    PromptTemplate prompt_template = PromptTemplate::default_template();
    /// UTC timestamp stamped on each record.
    std::function<std::string()> clock;
    /// Simulated runs leave latency at 0 so reruns stay byte-identical.
    bool record_latency = true;
};

/// Current time as "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_now();

/// Stage 3 over models x datasets x budgets x questions. Records come back
/// ordered by (model, dataset, budget, question id) whatever the worker
/// interleaving. Failed calls are kept as records with an empty answer and
/// the error text. Throws PlanError before any request when the plan is
/// invalid or a Truncation-mode trace is missing.
std::vector<ExperimentRecord> run_matrix(const RunPlan& plan, const QuestionSets& questions, const TraceStore& traces,
                                         const RunContext& context);

struct AccuracySummary {
    std::string model;
    std::string dataset_id;
    BudgetSpec budget;
    double accuracy = 0.0;
    std::uint64_t correct = 0;
    std::uint64_t n = 0;
    double mean_thinking_tokens = 0.0;

    bool operator==(const AccuracySummary&) const = default;
};

/// correct / total per (model, dataset, budget), sorted by that key.
std::vector<AccuracySummary> aggregate(const std::vector<ExperimentRecord>& records);

/// P(T_b) - P(T_0); the baseline must be the NoThinking row of the same model and dataset.
double delta_performance(const AccuracySummary& at, const AccuracySummary& baseline);

/// Thinking tokens over question tokens. Throws DomainError when input_tokens is 0.
double thinking_ratio(const ReasoningTrace& trace);

} // namespace thinkbudget
