// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace thinkbudget {

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

/// Library, dependency and compiler versions baked into this build.
std::map<std::string, std::string> build_versions();

/// Provenance written next to the outputs of every command. It carries no
/// timestamp, so two runs with the same inputs write the same manifest.
struct Manifest {
    struct Output {
        std::string file;
        std::string sha256;
    };

    std::string command;
    std::string run_id;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::map<std::string, std::string> versions = build_versions();
    std::vector<Output> outputs;

    /// Hashes the file and records it under its name relative to `dir`.
    void add_output(const std::filesystem::path& dir, const std::filesystem::path& file);
    std::string to_json() const;
};

/// Writes `manifest.<command>.json` into `dir` and returns its path.
std::filesystem::path write_manifest(const std::filesystem::path& dir, const Manifest& manifest);

} // namespace thinkbudget
