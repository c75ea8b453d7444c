// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "thinkbudget/budget.hpp"
#include "thinkbudget/domain.hpp"
#include "thinkbudget/tokenizer.hpp"

namespace thinkbudget {

inline constexpr std::string_view kThinkOpen = "<think>";
inline constexpr std::string_view kThinkClose = "</think>";

struct SplitResult {
    std::string thinking;
    std::string remainder;
    bool had_open_tag = false;
    bool had_close_tag = false;
};

/// Splits off the first <think>...</think> span. The remainder is the raw
/// text with that span removed (text before the open tag followed by text
/// after the close tag). An unterminated open tag makes everything after it
/// thinking and everything before it the remainder. Later think spans stay
/// in the remainder.
SplitResult extract_think(std::string_view raw);

/// Cuts thinking to the budget: NoThinking drops it, Unlimited keeps it
/// verbatim, Tokens(k) keeps the source prefix holding the first k tokens.
/// The cut is not repaired to a sentence boundary.
std::string truncate_thinking(std::string_view thinking, const BudgetSpec& budget, const Tokenizer& tok);

/// Prompt text with {stem}, {options} and {thinking} placeholders.
///
/// {options} expands to one "A. text" line per option in letter order.
/// {thinking} expands to "Partial reasoning:\n<text>\n". When the thinking
/// is empty the whole line holding the placeholder is dropped.
class PromptTemplate {
public:
    /// Throws TemplateError if a placeholder is missing.
    explicit PromptTemplate(std::string text);

    static PromptTemplate default_template();
    /// Throws TemplateError when the file cannot be read or is incomplete.
    static PromptTemplate from_file(const std::filesystem::path& path);

    const std::string& text() const noexcept { return text_; }
    std::string render(const QuestionRecord& question, std::string_view thinking) const;

private:
    std::string text_;
};

inline constexpr std::string_view kReasoningHeader = "Partial reasoning:";

std::string render_options(const QuestionRecord& question);

std::string reconstruct_prompt(const QuestionRecord& question, std::string_view truncated_thinking,
                               const PromptTemplate& prompt_template);

/// Stage-2 composition: extract_think -> truncate_thinking -> reconstruct_prompt.
std::string apply_budget(const ReasoningTrace& trace, const BudgetSpec& budget, const QuestionRecord& question,
                         const Tokenizer& tok, const PromptTemplate& prompt_template);

} // namespace thinkbudget
