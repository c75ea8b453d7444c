// SPDX-License-Identifier: Apache-2.0
#include "thinkbudget/manifest.hpp"

#include <array>
#include <cstdio>
#include <memory>

#include <httplib.h>
#include <json.hpp>
#include <openssl/evp.h>
#include <openssl/opensslv.h>

#include "thinkbudget/errors.hpp"
#include "thinkbudget/store.hpp"

namespace thinkbudget {

std::string sha256_hex(std::string_view data) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int length = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest.data(), &length) != 1) {
        throw Error("SHA-256 computation failed");
    }
    std::string hex;
    hex.reserve(length * 2);
    for (unsigned int i = 0; i < length; ++i) {
        char byte[3];
        std::snprintf(byte, sizeof byte, "%02x", digest[i]);
        hex += byte;
    }
    return hex;
}

std::map<std::string, std::string> build_versions() {
    return {
        {"thinkbudget", THINKBUDGET_VERSION},
        {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) +
                              "." + std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
        {"cpp-httplib", CPPHTTPLIB_VERSION},
        {"openssl", OPENSSL_VERSION_TEXT},
        {"compiler", __VERSION__},
    };
}

void Manifest::add_output(const std::filesystem::path& dir, const std::filesystem::path& file) {
    outputs.push_back(Output{file.lexically_relative(dir).generic_string(), sha256_hex(read_text_file(file))});
}

std::string Manifest::to_json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["run_id"] = run_id;
    j["config_hash"] = config_hash;
    j["seed"] = seed;
    j["versions"] = versions;
    auto outs = nlohmann::ordered_json::array();
    for (const auto& o : outputs) outs.push_back({{"file", o.file}, {"sha256", o.sha256}});
    j["outputs"] = std::move(outs);
    return j.dump(2) + "\n";
}

std::filesystem::path write_manifest(const std::filesystem::path& dir, const Manifest& manifest) {
    const auto path = dir / ("manifest." + manifest.command + ".json");
    write_text_file(path, manifest.to_json());
    return path;
}

} // namespace thinkbudget
