// SPDX-License-Identifier: Apache-2.0
#include "thinkbudget/budget.hpp"

#include <algorithm>
#include <charconv>

#include "thinkbudget/domain.hpp"
#include "thinkbudget/errors.hpp"

namespace thinkbudget {

std::string BudgetSpec::to_string() const {
    switch (kind_) {
    case Kind::NoThinking: return "none";
    case Kind::Unlimited: return "inf";
    case Kind::Tokens: break;
    }
    return std::to_string(tokens_);
}

BudgetSpec BudgetSpec::parse(std::string_view text) {
    if (text == "none" || text == "None") return none();
    if (text == "inf" || text == "unlimited" || text == "Unlimited") return unlimited();
    std::uint64_t value = 0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc{} || ptr != end) {
        throw ValidationError("invalid budget '" + std::string(text) + "' (expected none, inf or a token count)");
    }
    return tokens(value);
}

BudgetSpec effective_budget(const BudgetSpec& requested, const ModelSpec& model) {
    if (!model.max_thinking_tokens) return requested;
    return std::min(requested, BudgetSpec::tokens(*model.max_thinking_tokens));
}

const std::vector<BudgetSpec>& budget_ladder() {
    static const std::vector<BudgetSpec> ladder = {
        BudgetSpec::none(),        BudgetSpec::tokens(64),  BudgetSpec::tokens(128),
        BudgetSpec::tokens(256),   BudgetSpec::tokens(512), BudgetSpec::tokens(1024),
        BudgetSpec::unlimited(),
    };
    return ladder;
}

} // namespace thinkbudget
