// SPDX-License-Identifier: Apache-2.0
#include "thinkbudget/tokenizer.hpp"

#include <fstream>

#include "thinkbudget/errors.hpp"

namespace thinkbudget {
namespace {

bool is_space(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\v' || c == '\f' || c == '\r';
}

bool is_word(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c >= 0x80;
}

std::size_t utf8_length(unsigned char lead) {
    if (lead < 0x80) return 1;
    if ((lead & 0xE0) == 0xC0) return 2;
    if ((lead & 0xF0) == 0xE0) return 3;
    if ((lead & 0xF8) == 0xF0) return 4;
    return 1;
}

} // namespace

Tokenizer Tokenizer::whitespace() { return Tokenizer{std::string(kWhitespace), std::nullopt, nullptr}; }

Tokenizer Tokenizer::load(std::string_view name, const std::optional<std::filesystem::path>& vocab_ref) {
    if (name == kWhitespace) {
        if (vocab_ref) throw ConfigError("tokenizer 'whitespace' takes no vocab_ref");
        return whitespace();
    }
    if (name != kVocab) throw ConfigError("unknown tokenizer '" + std::string(name) + "'");
    if (!vocab_ref) throw ConfigError("tokenizer 'vocab' requires vocab_ref");

    std::ifstream in(*vocab_ref, std::ios::binary);
    if (!in) throw ConfigError("cannot open tokenizer vocabulary " + vocab_ref->string());
    auto vocab = std::make_shared<Vocabulary>();
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        vocab->longest = std::max(vocab->longest, line.size());
        vocab->pieces.insert(std::move(line));
    }
    if (vocab->pieces.empty()) throw ConfigError("tokenizer vocabulary " + vocab_ref->string() + " is empty");
    return Tokenizer{std::string(kVocab), vocab_ref, std::move(vocab)};
}

template <typename Sink>
bool Tokenizer::segment_word(std::string_view text, std::size_t begin, std::size_t end, Sink& sink) const {
    std::size_t pos = begin;
    while (pos < end) {
        std::size_t take = 0;
        const std::size_t max_len = std::min(vocab_->longest, end - pos);
        for (std::size_t len = max_len; len > 0; --len) {
            if (vocab_->pieces.contains(std::string(text.substr(pos, len)))) {
                take = len;
                break;
            }
        }
        if (take == 0) take = std::min(utf8_length(static_cast<unsigned char>(text[pos])), end - pos);
        if (!sink(TokenSpan{pos, take})) return false;
        pos += take;
    }
    return true;
}

// Calls sink(span) per token until it returns false.
template <typename Sink>
void Tokenizer::scan(std::string_view text, Sink&& sink) const {
    std::size_t pos = 0;
    const std::size_t n = text.size();
    while (pos < n) {
        const auto c = static_cast<unsigned char>(text[pos]);
        if (is_space(c)) {
            ++pos;
            continue;
        }
        if (!is_word(c)) {
            if (!sink(TokenSpan{pos, 1})) return;
            ++pos;
            continue;
        }
        std::size_t end = pos + 1;
        while (end < n && is_word(static_cast<unsigned char>(text[end]))) ++end;
        if (vocab_) {
            if (!segment_word(text, pos, end, sink)) return;
        } else if (!sink(TokenSpan{pos, end - pos})) {
            return;
        }
        pos = end;
    }
}

std::vector<TokenSpan> Tokenizer::tokenize(std::string_view text) const {
    std::vector<TokenSpan> out;
    scan(text, [&](TokenSpan span) {
        out.push_back(span);
        return true;
    });
    return out;
}

std::size_t Tokenizer::count(std::string_view text) const {
    std::size_t n = 0;
    scan(text, [&](TokenSpan) {
        ++n;
        return true;
    });
    return n;
}

std::string_view Tokenizer::prefix(std::string_view text, std::size_t k) const {
    if (k == 0) return text.substr(0, 0);
    std::size_t seen = 0;
    std::size_t end = 0;
    bool truncated = false;
    scan(text, [&](TokenSpan span) {
        if (seen == k) {
            truncated = true;
            return false;
        }
        ++seen;
        end = span.end();
        return true;
    });
    return truncated ? text.substr(0, end) : text;
}

} // namespace thinkbudget
