// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "thinkbudget/budget.hpp"
#include "thinkbudget/domain.hpp"
#include "thinkbudget/gateway.hpp"
#include "thinkbudget/tokenizer.hpp"

namespace thinkbudget {

/// Synthetic reasoning model driven by the log scaling law
///   p = clamp(alpha*ln(t+1) + beta*ln(size) + gamma + eps, 0, 1),
/// where t is the number of thinking tokens the model actually spends and
/// eps ~ N(0, noise_sigma^2).
struct SimulatedModel {
    ModelSpec spec;
    double alpha = 0.08;
    double beta = 0.12;
    double gamma = 0.0;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
    /// Unconstrained trace length is ratio * input tokens with the ratio
    /// drawn uniformly from [ratio_min, ratio_max] per question.
    double ratio_min = 2.3;
    double ratio_max = 6.2;

    void validate() const;
};

/// Independent random stream for one (seed, model, question, purpose).
/// Streams share no state, so workers can draw in any order.
std::mt19937_64 derive_stream(std::uint64_t seed, std::string_view model, std::string_view question_id,
                              std::string_view purpose);

/// Law value before noise, clamped to [0,1].
double correctness_probability(const SimulatedModel& model, double thinking_tokens, double epsilon = 0.0);

/// Length in tokens of the model's unconstrained reasoning for this question.
std::uint64_t trace_length(const SimulatedModel& model, const QuestionRecord& question, std::uint64_t input_tokens);

/// Deterministic filler "step_1 step_2 ..." cut to exactly `count` tokens.
std::string filler_thinking(std::uint64_t count, const Tokenizer& tok);

/// Emits "<think>...</think>\n\nAnswer: X". The think block holds
/// min(budget, trace_length) tokens; X is the ground truth with probability
/// p, otherwise a uniformly drawn wrong letter. Reproducible from the model
/// seed and question id alone.
ChatResponse simulate_complete(const SimulatedModel& model, const QuestionRecord& question, const BudgetSpec& budget,
                               std::uint64_t input_tokens, const Tokenizer& tok);

} // namespace thinkbudget
