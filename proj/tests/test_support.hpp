// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

#include "thinkbudget/domain.hpp"

namespace testing {

inline std::filesystem::path data_path(const std::string& name) { return std::filesystem::path(TEST_DATA_DIR) / name; }

inline std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline nlohmann::json load_json(const std::string& name) { return nlohmann::json::parse(slurp(data_path(name))); }

// Fresh scratch directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("thinkbudget-" + tag + "-" + std::to_string(rd()) + "-" +
                 std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline thinkbudget::QuestionRecord make_question(const std::string& id, int n_options, const std::string& truth) {
    thinkbudget::QuestionRecord q;
    q.id = id;
    q.dataset_id = "ds";
    q.stem = "Stem of question " + id + " with several words";
    for (int i = 0; i < n_options; ++i) {
        const char letter = static_cast<char>('A' + i);
        q.options.emplace(letter, std::string("choice ") + letter);
    }
    q.ground_truth = thinkbudget::LetterSet::parse(truth);
    q.tier = thinkbudget::Tier::Attending;
    q.specialty = "cardiology";
    return q;
}

} // namespace testing
