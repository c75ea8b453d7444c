// SPDX-License-Identifier: Apache-2.0
#include "thinkbudget/questions.hpp"

#include <array>
#include <cstdio>
#include <random>

#include "thinkbudget/simulator.hpp"

namespace thinkbudget {
namespace {

constexpr std::array<const char*, 24> kWords = {
    "patient", "presents", "with", "acute", "chronic", "pain", "fever", "history", "of", "hypertension",
    "elevated", "troponin", "murmur", "dyspnea", "lesion", "biopsy", "shows", "infiltrate", "renal", "hepatic",
    "cardiac", "neurologic", "deficit", "findings",
};

constexpr std::array<const char*, 12> kSpecialties = {
    "cardiology", "neurology", "oncology", "nephrology", "pulmonology", "gastroenterology",
    "endocrinology", "hematology", "rheumatology", "infectious_disease", "dermatology", "psychiatry",
};

} // namespace

std::vector<QuestionRecord> synthetic_questions(const std::string& dataset_id, std::size_t count, std::uint64_t seed) {
    std::vector<QuestionRecord> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        char id[32];
        std::snprintf(id, sizeof id, "q%04zu", i + 1);
        auto rng = derive_stream(seed, dataset_id, id, "question");

        QuestionRecord q;
        q.id = id;
        q.dataset_id = dataset_id;
        q.tier = i % 2 == 0 ? Tier::Attending : Tier::Chief;
        q.specialty = kSpecialties[std::uniform_int_distribution<std::size_t>(0, kSpecialties.size() - 1)(rng)];

        const auto [lo, hi] = q.tier == Tier::Attending ? std::pair{250, 350} : std::pair{400, 600};
        const int words = std::uniform_int_distribution<int>(lo, hi)(rng);
        std::uniform_int_distribution<std::size_t> pick(0, kWords.size() - 1);
        for (int w = 0; w < words; ++w) {
            if (w > 0) q.stem += ' ';
            q.stem += kWords[pick(rng)];
        }
        q.stem += " ?";

        const int n_options = std::uniform_int_distribution<int>(4, 5)(rng);
        for (int k = 0; k < n_options; ++k) {
            const char letter = static_cast<char>('A' + k);
            q.options.emplace(letter, std::string("option ") + letter + " " + kWords[pick(rng)]);
        }
        q.ground_truth.insert(static_cast<char>('A' + std::uniform_int_distribution<int>(0, n_options - 1)(rng)));
        out.push_back(std::move(q));
    }
    return out;
}

} // namespace thinkbudget
