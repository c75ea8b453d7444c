// SPDX-License-Identifier: Apache-2.0
#include "thinkbudget/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "thinkbudget/errors.hpp"

namespace thinkbudget {
namespace {

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace

void SimulatedModel::validate() const {
    spec.validate();
    if (!(noise_sigma >= 0.0)) throw ValidationError("simulated model '" + spec.name + "': noise_sigma must be >= 0");
    if (!(ratio_min > 0.0 && ratio_min <= ratio_max)) {
        throw ValidationError("simulated model '" + spec.name + "': need 0 < ratio_min <= ratio_max");
    }
}

std::mt19937_64 derive_stream(std::uint64_t seed, std::string_view model, std::string_view question_id,
                              std::string_view purpose) {
    const std::array<std::uint64_t, 4> words = {seed, fnv1a(model), fnv1a(question_id), fnv1a(purpose)};
    std::array<std::uint32_t, 8> halves{};
    for (std::size_t i = 0; i < words.size(); ++i) {
        halves[2 * i] = static_cast<std::uint32_t>(words[i]);
        halves[2 * i + 1] = static_cast<std::uint32_t>(words[i] >> 32);
    }
    std::seed_seq seq(halves.begin(), halves.end());
    return std::mt19937_64(seq);
}

double correctness_probability(const SimulatedModel& model, double thinking_tokens, double epsilon) {
    const double p = model.alpha * std::log(thinking_tokens + 1.0) + model.beta * std::log(model.spec.size_billions) +
                     model.gamma + epsilon;
    return std::clamp(p, 0.0, 1.0);
}

std::uint64_t trace_length(const SimulatedModel& model, const QuestionRecord& question, std::uint64_t input_tokens) {
    auto rng = derive_stream(model.seed, model.spec.name, question.id, "trace-length");
    std::uniform_real_distribution<double> ratio(model.ratio_min, model.ratio_max);
    const double n = static_cast<double>(input_tokens);
    // Rounding must not push the ratio outside [ratio_min, ratio_max].
    const double lo = std::ceil(model.ratio_min * n);
    const double hi = std::max(lo, std::floor(model.ratio_max * n));
    const double length = std::clamp(std::round(ratio(rng) * n), lo, hi);
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(length));
}

std::string filler_thinking(std::uint64_t count, const Tokenizer& tok) {
    std::string words;
    words.reserve(count * 9);
    for (std::uint64_t i = 1; i <= count; ++i) {
        if (i > 1) words += ' ';
        words += "step_";
        words += std::to_string(i);
    }
    return std::string(tok.prefix(words, count));
}

ChatResponse simulate_complete(const SimulatedModel& model, const QuestionRecord& question, const BudgetSpec& budget,
                               std::uint64_t input_tokens, const Tokenizer& tok) {
    const std::uint64_t full = trace_length(model, question, input_tokens);
    const std::uint64_t spent = budget.is_unlimited() ? full : std::min(full, *budget.limit());

    double epsilon = 0.0;
    if (model.noise_sigma > 0.0) {
        auto noise_rng = derive_stream(model.seed, model.spec.name, question.id, "noise:" + budget.to_string());
        std::normal_distribution<double> noise(0.0, model.noise_sigma);
        epsilon = noise(noise_rng);
    }
    const double p = correctness_probability(model, static_cast<double>(spent), epsilon);

    // One uniform per question shared by every budget keeps outcomes coupled
    // across the ladder: a question answered correctly at p stays correct at p' > p.
    auto answer_rng = derive_stream(model.seed, model.spec.name, question.id, "answer");
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double u = unit(answer_rng);

    std::string answer;
    if (u < p) {
        answer = question.ground_truth.to_string();
    } else {
        const LetterSet wrong = question.option_letters().without(question.ground_truth);
        if (wrong.empty()) {
            answer = "unknown";
        } else {
            std::uniform_int_distribution<int> pick(0, wrong.size() - 1);
            int index = pick(answer_rng);
            for (char c = LetterSet::kFirst; c <= LetterSet::kLast; ++c) {
                if (wrong.contains(c) && index-- == 0) {
                    answer = std::string(1, c);
                    break;
                }
            }
        }
    }

    ChatResponse out;
    out.content = "<think>\n" + filler_thinking(spent, tok) + "\n</think>\n\nAnswer: " + answer;
    out.prompt_tokens = input_tokens;
    out.completion_tokens = tok.count(out.content);
    return out;
}

} // namespace thinkbudget
