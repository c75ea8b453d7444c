// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "thinkbudget/budget.hpp"
#include "thinkbudget/domain.hpp"
#include "thinkbudget/gateway.hpp"
#include "thinkbudget/runner.hpp"

namespace thinkbudget {

/// Generator parameters for a model served by a "sim://" endpoint.
struct SimulationParams {
    double alpha = 0.08;
    double beta = 0.12;
    double gamma = 0.0;
    double noise_sigma = 0.0;
    double ratio_min = 2.3;
    double ratio_max = 6.2;
};

struct ModelConfig {
    ModelSpec spec;
    std::optional<SimulationParams> simulation;
};

struct DatasetRef {
    std::string id;
    std::filesystem::path path;
};

struct TokenizerConfig {
    std::string name = "whitespace";
    std::optional<std::filesystem::path> vocab_ref;
};

/// Everything a pipeline run needs. Relative paths in the file are resolved
/// against the directory holding it.
///
/// Keys: run_id, endpoints, models, datasets, budgets, mode, template_path,
/// tokenizer, parallelism, seed, output_dir, native_prompt.
struct RunConfig {
    std::string run_id;
    std::map<std::string, EndpointConfig> endpoints;
    std::vector<ModelConfig> models;
    std::vector<DatasetRef> datasets;
    std::vector<BudgetSpec> budgets;
    RunMode mode = RunMode::Truncation;
    std::optional<std::filesystem::path> template_path;
    TokenizerConfig tokenizer;
    int parallelism = 1;
    std::uint64_t seed = 0;
    std::filesystem::path output_dir;
    /// "bare" (false) or "reconstructed" (true); Native mode only.
    bool native_reconstructs_prompt = false;

    /// Compact JSON of the document as parsed; the manifest hashes this.
    std::string canonical_json;

    const ModelConfig* find_model(std::string_view name) const;
    RunPlan plan() const;
};

inline constexpr std::string_view kSimulatedScheme = "sim://";
bool is_simulated_endpoint(const EndpointConfig& endpoint);

/// Parses and validates a config document. Syntax errors report line and
/// column; unknown keys report their JSON pointer; all semantic violations
/// are collected into a single ConfigError.
RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir,
                       std::string_view source_name = "<config>");
RunConfig load_config(const std::filesystem::path& path);

} // namespace thinkbudget
