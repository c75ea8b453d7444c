// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace thinkbudget {

struct ModelSpec;

/// A thinking budget: no thinking, a fixed token allowance, or unlimited.
///
/// Zero tokens and "no thinking" are the same value; `tokens(0)` yields
/// `none()`. Budgets are totally ordered:
/// none < tokens(a) < tokens(b) < unlimited for 0 < a < b.
class BudgetSpec {
public:
    enum class Kind : std::uint8_t { NoThinking = 0, Tokens = 1, Unlimited = 2 };

    constexpr BudgetSpec() = default;

    static constexpr BudgetSpec none() { return BudgetSpec{}; }
    static constexpr BudgetSpec unlimited() { return BudgetSpec{Kind::Unlimited, 0}; }
    static constexpr BudgetSpec tokens(std::uint64_t count) {
        return count == 0 ? none() : BudgetSpec{Kind::Tokens, count};
    }

    constexpr Kind kind() const noexcept { return kind_; }
    constexpr bool is_none() const noexcept { return kind_ == Kind::NoThinking; }
    constexpr bool is_tokens() const noexcept { return kind_ == Kind::Tokens; }
    constexpr bool is_unlimited() const noexcept { return kind_ == Kind::Unlimited; }

    /// Token allowance; 0 for NoThinking, and an empty optional for Unlimited.
    constexpr std::optional<std::uint64_t> limit() const noexcept {
        if (kind_ == Kind::Unlimited) return std::nullopt;
        return tokens_;
    }

    constexpr std::strong_ordering operator<=>(const BudgetSpec& other) const noexcept {
        if (auto c = kind_ <=> other.kind_; c != 0) return c;
        return tokens_ <=> other.tokens_;
    }
    constexpr bool operator==(const BudgetSpec&) const noexcept = default;

    /// "none", "64", ..., "inf".
    std::string to_string() const;

    /// Inverse of to_string(). Also accepts "0" (as none) and "unlimited".
    static BudgetSpec parse(std::string_view text);

private:
    constexpr BudgetSpec(Kind kind, std::uint64_t count) : kind_(kind), tokens_(count) {}

    Kind kind_ = Kind::NoThinking;
    std::uint64_t tokens_ = 0;
};

/// Caps a requested budget at the model's maximum thinking capacity.
BudgetSpec effective_budget(const BudgetSpec& requested, const ModelSpec& model);

/// none, 64, 128, 256, 512, 1024, inf.
const std::vector<BudgetSpec>& budget_ladder();

} // namespace thinkbudget
