// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "thinkbudget/domain.hpp"

namespace thinkbudget {

/// Deterministic multiple-choice questions for simulated runs.
///
/// Tiers alternate Attending / Chief. Attending stems hold 250-350 words and
/// Chief stems 400-600, so Chief questions carry longer inputs. Each
/// question has 4 or 5 options and a single correct letter.
std::vector<QuestionRecord> synthetic_questions(const std::string& dataset_id, std::size_t count, std::uint64_t seed);

} // namespace thinkbudget
