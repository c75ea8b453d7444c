// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace thinkbudget {

/// Byte range of one token inside the source text.
struct TokenSpan {
    std::size_t offset = 0;
    std::size_t length = 0;

    std::size_t end() const noexcept { return offset + length; }
    bool operator==(const TokenSpan&) const = default;
};

/// Read-only tokenizer. Tokens are spans into the original text, so the
/// detokenization of the first k tokens is the source prefix ending at the
/// k-th token. Re-tokenizing such a prefix yields the same k tokens.
///
/// Two variants exist:
///  - "whitespace": runs of word bytes ([A-Za-z0-9_] and any byte >= 0x80)
///    form one token; every other non-whitespace ASCII byte is its own token.
///  - "vocab": the same pre-split, after which each word is segmented by
///    greedy longest match against a vocabulary file (one token per line).
///    Unmatched input falls back to single UTF-8 code points.
class Tokenizer {
public:
    static constexpr std::string_view kWhitespace = "whitespace";
    static constexpr std::string_view kVocab = "vocab";

    /// Throws ConfigError when the name is unknown or the vocabulary cannot be read.
    static Tokenizer load(std::string_view name, const std::optional<std::filesystem::path>& vocab_ref = std::nullopt);
    static Tokenizer whitespace();

    const std::string& name() const noexcept { return name_; }
    const std::optional<std::filesystem::path>& vocab_ref() const noexcept { return vocab_ref_; }

    std::vector<TokenSpan> tokenize(std::string_view text) const;
    std::size_t count(std::string_view text) const;

    /// Source prefix covering the first min(k, count) tokens.
    std::string_view prefix(std::string_view text, std::size_t k) const;

private:
    struct Vocabulary {
        std::unordered_set<std::string> pieces;
        std::size_t longest = 0;
    };

    Tokenizer(std::string name, std::optional<std::filesystem::path> vocab_ref, std::shared_ptr<const Vocabulary> vocab)
        : name_(std::move(name)), vocab_ref_(std::move(vocab_ref)), vocab_(std::move(vocab)) {}

    template <typename Sink>
    void scan(std::string_view text, Sink&& sink) const;
    template <typename Sink>
    bool segment_word(std::string_view text, std::size_t begin, std::size_t end, Sink& sink) const;

    std::string name_;
    std::optional<std::filesystem::path> vocab_ref_;
    std::shared_ptr<const Vocabulary> vocab_;
};

} // namespace thinkbudget
