// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "thinkbudget/budget.hpp"

namespace thinkbudget {

/// Set of option letters A..F.
class LetterSet {
public:
    static constexpr char kFirst = 'A';
    static constexpr char kLast = 'F';

    constexpr LetterSet() = default;
    LetterSet(std::initializer_list<char> letters);

    /// Parses "B,C" / "B, C" / "BC". Throws ValidationError on letters outside A..F.
    static LetterSet parse(std::string_view text);

    static constexpr bool valid_letter(char c) noexcept { return c >= kFirst && c <= kLast; }

    void insert(char letter);
    constexpr bool contains(char letter) const noexcept {
        return valid_letter(letter) && (bits_ >> (letter - kFirst) & 1u) != 0;
    }
    constexpr bool empty() const noexcept { return bits_ == 0; }
    int size() const noexcept;
    constexpr bool subset_of(LetterSet other) const noexcept { return (bits_ & ~other.bits_) == 0; }
    constexpr LetterSet intersect(LetterSet other) const noexcept { return LetterSet(static_cast<std::uint8_t>(bits_ & other.bits_)); }
    constexpr LetterSet without(LetterSet other) const noexcept { return LetterSet(static_cast<std::uint8_t>(bits_ & ~other.bits_)); }

    /// Letters in alphabetical order, comma separated: "B,C".
    std::string to_string() const;

    constexpr std::uint8_t bits() const noexcept { return bits_; }
    constexpr bool operator==(const LetterSet&) const noexcept = default;

private:
    constexpr explicit LetterSet(std::uint8_t bits) : bits_(bits) {}
    std::uint8_t bits_ = 0;
};

struct ModelSpec {
    std::string name;
    std::string family;
    double size_billions = 1.0;
    bool native_budget_support = false;
    std::optional<std::uint64_t> max_thinking_tokens;
    std::string endpoint_ref;

    void validate() const;
};

enum class Tier { Attending, Chief, Other };

std::string_view to_string(Tier tier);
Tier parse_tier(std::string_view text);

struct QuestionRecord {
    std::string id;
    std::string dataset_id;
    std::string stem;
    std::map<char, std::string> options;
    LetterSet ground_truth;
    Tier tier = Tier::Other;
    std::string specialty;

    LetterSet option_letters() const;
    /// Options are 2..6 contiguous letters from A; truth is a nonempty subset of them.
    void validate() const;
};

/// A model output split into its thinking segment and answer segment.
struct ReasoningTrace {
    std::string raw;
    std::string thinking;
    std::string answer_text;
    std::uint64_t thinking_tokens = 0;
    std::uint64_t input_tokens = 0;
    bool had_think_tags = false;
};

struct ExperimentRecord {
    std::string run_id;
    std::string model;
    std::string dataset_id;
    std::string question_id;
    BudgetSpec budget;
    LetterSet extracted_answer;
    bool correct = false;
    std::uint64_t thinking_tokens = 0;
    std::uint64_t input_tokens = 0;
    std::uint64_t latency_ms = 0;
    std::string created_at;
    /// Set when the call failed; the record then scores as an extraction failure.
    std::optional<std::string> error;

    bool operator==(const ExperimentRecord&) const = default;
};

/// Aggregated accuracy at one (budget, model size) condition.
struct AccuracyPoint {
    BudgetSpec budget;
    double model_size = 1.0;
    double accuracy = 0.0;
    std::uint64_t n = 1;

    void validate() const;
};

} // namespace thinkbudget
