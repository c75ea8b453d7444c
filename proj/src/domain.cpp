// SPDX-License-Identifier: Apache-2.0
#include "thinkbudget/domain.hpp"

#include <bit>
#include <cmath>

#include "thinkbudget/errors.hpp"

namespace thinkbudget {

LetterSet::LetterSet(std::initializer_list<char> letters) {
    for (char c : letters) insert(c);
}

LetterSet LetterSet::parse(std::string_view text) {
    LetterSet out;
    for (char c : text) {
        if (c == ',' || c == ' ') continue;
        out.insert(c);
    }
    return out;
}

void LetterSet::insert(char letter) {
    if (!valid_letter(letter)) {
        throw ValidationError(std::string("option letter '") + letter + "' outside A-F");
    }
    bits_ = static_cast<std::uint8_t>(bits_ | (1u << (letter - kFirst)));
}

int LetterSet::size() const noexcept { return std::popcount(bits_); }

std::string LetterSet::to_string() const {
    std::string out;
    for (char c = kFirst; c <= kLast; ++c) {
        if (!contains(c)) continue;
        if (!out.empty()) out += ',';
        out += c;
    }
    return out;
}

void ModelSpec::validate() const {
    if (name.empty()) throw ValidationError("model name is empty");
    if (!(size_billions > 0.0) || !std::isfinite(size_billions)) {
        throw ValidationError("model '" + name + "': size_billions must be positive");
    }
    if (max_thinking_tokens && *max_thinking_tokens == 0) {
        throw ValidationError("model '" + name + "': max_thinking_tokens must be positive");
    }
}

std::string_view to_string(Tier tier) {
    switch (tier) {
    case Tier::Attending: return "Attending";
    case Tier::Chief: return "Chief";
    case Tier::Other: break;
    }
    return "Other";
}

Tier parse_tier(std::string_view text) {
    if (text == "Attending") return Tier::Attending;
    if (text == "Chief") return Tier::Chief;
    if (text == "Other") return Tier::Other;
    throw ValidationError("unknown tier '" + std::string(text) + "'");
}

LetterSet QuestionRecord::option_letters() const {
    LetterSet out;
    for (const auto& [letter, text] : options) out.insert(letter);
    return out;
}

void QuestionRecord::validate() const {
    if (id.empty()) throw ValidationError("question id is empty");
    if (options.size() < 2) throw ValidationError("question '" + id + "': needs at least 2 options");
    char expected = LetterSet::kFirst;
    for (const auto& [letter, text] : options) {
        if (!LetterSet::valid_letter(letter) || letter != expected) {
            throw ValidationError("question '" + id + "': option letters must run contiguously from A (A-F)");
        }
        ++expected;
    }
    if (ground_truth.empty()) throw ValidationError("question '" + id + "': ground truth is empty");
    if (!ground_truth.subset_of(option_letters())) {
        throw ValidationError("question '" + id + "': ground truth " + ground_truth.to_string() + " not among options");
    }
}

void AccuracyPoint::validate() const {
    if (!(model_size > 0.0)) throw ValidationError("accuracy point: model size must be positive");
    if (!(accuracy >= 0.0 && accuracy <= 1.0)) throw ValidationError("accuracy point: accuracy outside [0,1]");
    if (n < 1) throw ValidationError("accuracy point: n must be at least 1");
}

} // namespace thinkbudget
