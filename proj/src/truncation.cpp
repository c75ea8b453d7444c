// SPDX-License-Identifier: Apache-2.0
#include "thinkbudget/truncation.hpp"

#include <fstream>
#include <sstream>

#include "thinkbudget/errors.hpp"

namespace thinkbudget {
namespace {

constexpr std::string_view kStemSlot = "{stem}";
constexpr std::string_view kOptionsSlot = "{options}";
constexpr std::string_view kThinkingSlot = "{thinking}";

constexpr std::string_view kDefaultTemplate =
    "{stem}\n"
    "\n"
    "{options}\n"
    "\n"
    "{thinking}\n"
    "Answer with the letter of the correct option in the form \"Answer: X\".\n";

} // namespace

SplitResult extract_think(std::string_view raw) {
    SplitResult out;
    const auto open = raw.find(kThinkOpen);
    if (open == std::string_view::npos) {
        out.remainder = std::string(raw);
        return out;
    }
    out.had_open_tag = true;
    const auto body = open + kThinkOpen.size();
    const auto close = raw.find(kThinkClose, body);
    out.remainder = std::string(raw.substr(0, open));
    if (close == std::string_view::npos) {
        out.thinking = std::string(raw.substr(body));
        return out;
    }
    out.had_close_tag = true;
    out.thinking = std::string(raw.substr(body, close - body));
    out.remainder += raw.substr(close + kThinkClose.size());
    return out;
}

std::string truncate_thinking(std::string_view thinking, const BudgetSpec& budget, const Tokenizer& tok) {
    if (budget.is_none()) return {};
    if (budget.is_unlimited()) return std::string(thinking);
    return std::string(tok.prefix(thinking, static_cast<std::size_t>(*budget.limit())));
}

PromptTemplate::PromptTemplate(std::string text) : text_(std::move(text)) {
    std::string missing;
    for (auto slot : {kStemSlot, kOptionsSlot, kThinkingSlot}) {
        if (text_.find(slot) == std::string::npos) {
            if (!missing.empty()) missing += ", ";
            missing += slot;
        }
    }
    if (!missing.empty()) throw TemplateError("prompt template is missing placeholder(s) " + missing);
}

PromptTemplate PromptTemplate::default_template() { return PromptTemplate{std::string(kDefaultTemplate)}; }

PromptTemplate PromptTemplate::from_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw TemplateError("cannot read prompt template " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return PromptTemplate{buffer.str()};
}

std::string render_options(const QuestionRecord& question) {
    std::string out;
    for (const auto& [letter, text] : question.options) {
        if (!out.empty()) out += '\n';
        out += letter;
        out += ". ";
        out += text;
    }
    return out;
}

std::string PromptTemplate::render(const QuestionRecord& question, std::string_view thinking) const {
    const std::string options = render_options(question);
    std::string block;
    if (!thinking.empty()) {
        block.reserve(kReasoningHeader.size() + thinking.size() + 2);
        block += kReasoningHeader;
        block += '\n';
        block += thinking;
        block += '\n';
    }

    std::string out;
    out.reserve(text_.size() + question.stem.size() + options.size() + block.size());
    std::string_view rest = text_;
    while (!rest.empty()) {
        auto nl = rest.find('\n');
        std::string_view line = rest.substr(0, nl == std::string_view::npos ? rest.size() : nl + 1);
        rest.remove_prefix(line.size());
        if (thinking.empty() && line.find(kThinkingSlot) != std::string_view::npos) continue;

        // Single pass so placeholder-like text inside substituted values is left alone.
        std::size_t pos = 0;
        while (pos < line.size()) {
            auto brace = line.find('{', pos);
            if (brace == std::string_view::npos) {
                out += line.substr(pos);
                break;
            }
            out += line.substr(pos, brace - pos);
            auto tail = line.substr(brace);
            if (tail.starts_with(kStemSlot)) {
                out += question.stem;
                pos = brace + kStemSlot.size();
            } else if (tail.starts_with(kOptionsSlot)) {
                out += options;
                pos = brace + kOptionsSlot.size();
            } else if (tail.starts_with(kThinkingSlot)) {
                out += block;
                pos = brace + kThinkingSlot.size();
            } else {
                out += '{';
                pos = brace + 1;
            }
        }
    }
    return out;
}

std::string reconstruct_prompt(const QuestionRecord& question, std::string_view truncated_thinking,
                               const PromptTemplate& prompt_template) {
    return prompt_template.render(question, truncated_thinking);
}

std::string apply_budget(const ReasoningTrace& trace, const BudgetSpec& budget, const QuestionRecord& question,
                         const Tokenizer& tok, const PromptTemplate& prompt_template) {
    const auto split = extract_think(trace.raw);
    return reconstruct_prompt(question, truncate_thinking(split.thinking, budget, tok), prompt_template);
}

} // namespace thinkbudget
