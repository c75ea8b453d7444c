// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "test_support.hpp"
#include "thinkbudget/config.hpp"
#include "thinkbudget/errors.hpp"
#include "thinkbudget/store.hpp"

using namespace thinkbudget;
using nlohmann::json;

namespace {

// Minimal valid config pointing at one dataset file inside `dir`.
json minimal(const testing::TempDir& dir) {
    write_text_file(dir / "cardio.jsonl",
                    R"({"id":"c1","stem":"S?","options":{"A":"a","B":"b"},"ground_truth":"A","tier":"Chief","specialty":"cardio"})"
                    "\n");
    return json{
        {"endpoints", {{"local", {{"base_url", "http://127.0.0.1:8000"}}}}},
        {"models", json::array({{{"name", "qwen3-8b"}, {"family", "qwen"}, {"size_billions", 8}, {"endpoint", "local"}}})},
        {"datasets", json::array({{{"id", "cardio"}, {"path", "cardio.jsonl"}}})},
    };
}

std::vector<std::string> violations_of(const json& doc, const testing::TempDir& dir) {
    try {
        parse_config(doc.dump(2), dir.path(), "cfg.json");
    } catch (const ConfigError& e) {
        return e.violations();
    }
    return {};
}

bool mentions(const std::vector<std::string>& violations, const std::string& needle) {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const std::string& v) { return v.find(needle) != std::string::npos; });
}

} // namespace

TEST_CASE("a minimal config takes the defaults") {
    testing::TempDir dir("cfg-min");
    const auto cfg = parse_config(minimal(dir).dump(), dir.path());
    CHECK(cfg.run_id == "run-0");
    CHECK(cfg.budgets == budget_ladder());
    CHECK(cfg.mode == RunMode::Truncation);
    CHECK(cfg.parallelism == 1);
    CHECK(cfg.seed == 0);
    CHECK(cfg.tokenizer.name == "whitespace");
    CHECK(cfg.output_dir == dir.path() / "out");
    CHECK(cfg.datasets.at(0).path == dir.path() / "cardio.jsonl");
    const auto& endpoint = cfg.endpoints.at("local");
    CHECK(endpoint.id == "local");
    CHECK(endpoint.max_attempts == 3);
    CHECK(endpoint.budget_field == "thinking_budget");
    CHECK_FALSE(is_simulated_endpoint(endpoint));
    REQUIRE(cfg.find_model("qwen3-8b") != nullptr);
    CHECK(cfg.find_model("qwen3-8b")->spec.size_billions == 8.0);
    CHECK(cfg.find_model("ghost") == nullptr);
    CHECK_NOTHROW(cfg.plan().validate());
}

TEST_CASE("explicit values override the defaults") {
    testing::TempDir dir("cfg-full");
    auto doc = minimal(dir);
    doc["run_id"] = "nightly";
    doc["budgets"] = json::array({"none", 64, "256", "inf"});
    doc["parallelism"] = 8;
    doc["seed"] = 123;
    doc["output_dir"] = "results/nightly";
    doc["endpoints"]["local"]["timeout_s"] = 2.5;
    doc["endpoints"]["local"]["max_in_flight"] = 16;
    doc["models"][0]["native_budget_support"] = true;
    doc["models"][0]["max_thinking_tokens"] = 4096;
    doc["mode"] = "native";
    doc["native_prompt"] = "reconstructed";
    const auto cfg = parse_config(doc.dump(), dir.path());
    CHECK(cfg.run_id == "nightly");
    CHECK(cfg.budgets == std::vector<BudgetSpec>{BudgetSpec::none(), BudgetSpec::tokens(64), BudgetSpec::tokens(256),
                                                 BudgetSpec::unlimited()});
    CHECK(cfg.parallelism == 8);
    CHECK(cfg.seed == 123);
    CHECK(cfg.output_dir == dir.path() / "results/nightly");
    CHECK(cfg.endpoints.at("local").timeout == std::chrono::milliseconds(2500));
    CHECK(cfg.endpoints.at("local").max_in_flight == 16);
    CHECK(cfg.mode == RunMode::Native);
    CHECK(cfg.native_reconstructs_prompt);
    CHECK(cfg.models[0].spec.max_thinking_tokens == std::optional<std::uint64_t>(4096));
    CHECK(cfg.plan().native_reconstructs_prompt);
}

TEST_CASE("duplicate model names are rejected") {
    testing::TempDir dir("cfg-dup");
    auto doc = minimal(dir);
    doc["models"].push_back(doc["models"][0]);
    CHECK(mentions(violations_of(doc, dir), "/models/1/name: duplicate model name 'qwen3-8b'"));
}

TEST_CASE("a missing template file is reported") {
    testing::TempDir dir("cfg-tmpl");
    auto doc = minimal(dir);
    doc["template_path"] = "templates/absent.txt";
    CHECK(mentions(violations_of(doc, dir), "/template_path: template file not found"));

    write_text_file(dir / "incomplete.txt", "{stem} only\n");
    doc["template_path"] = "incomplete.txt";
    CHECK(mentions(violations_of(doc, dir), "/template_path"));
}

TEST_CASE("unknown keys are reported at their JSON pointer") {
    testing::TempDir dir("cfg-unknown");
    auto doc = minimal(dir);
    doc["models"][0]["temprature"] = 0.2;
    doc["paralelism"] = 2;
    const auto v = violations_of(doc, dir);
    CHECK(mentions(v, "cfg.json: /models/0/temprature: unknown key"));
    CHECK(mentions(v, "/paralelism: unknown key"));
}

TEST_CASE("syntax errors carry line and column") {
    testing::TempDir dir("cfg-syntax");
    const std::string text = "{\n  \"run_id\": \"x\",\n  \"models\": [,]\n}\n";
    try {
        parse_config(text, dir.path(), "broken.json");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).rfind("broken.json:3:", 0) == 0);
        CHECK(std::string(e.what()).find("parse error") != std::string::npos);
    }
}

TEST_CASE("every violation is reported at once") {
    testing::TempDir dir("cfg-many");
    auto doc = minimal(dir);
    doc["parallelism"] = 0;
    doc["budgets"] = json::array({64, 64});
    doc["models"][0]["endpoint"] = "nowhere";
    doc["models"][0]["size_billions"] = -1;
    doc["datasets"][0]["path"] = "missing.jsonl";
    doc["mode"] = "hybrid";
    const auto v = violations_of(doc, dir);
    CHECK(v.size() >= 6);
    CHECK(mentions(v, "/parallelism"));
    CHECK(mentions(v, "/budgets/1: duplicate budget 64"));
    CHECK(mentions(v, "unknown endpoint 'nowhere'"));
    CHECK(mentions(v, "/models/0/size_billions"));
    CHECK(mentions(v, "dataset file not found"));
    CHECK(mentions(v, "/mode"));
}

TEST_CASE("cross-field rules") {
    testing::TempDir dir("cfg-cross");
    auto native = minimal(dir);
    native["mode"] = "Native";
    CHECK(mentions(violations_of(native, dir), "native_budget_support"));

    auto sim = minimal(dir);
    sim["endpoints"]["local"]["base_url"] = "sim://local";
    CHECK(mentions(violations_of(sim, dir), "has no simulation block"));
    sim["models"][0]["simulation"] = {{"alpha", 0.1}, {"gamma", 0.05}};
    const auto cfg = parse_config(sim.dump(), dir.path());
    CHECK(is_simulated_endpoint(cfg.endpoints.at("local")));
    REQUIRE(cfg.models[0].simulation.has_value());
    CHECK(cfg.models[0].simulation->alpha == 0.1);
    CHECK(cfg.models[0].simulation->beta == 0.12);

    auto stray = minimal(dir);
    stray["models"][0]["simulation"] = json::object();
    CHECK(mentions(violations_of(stray, dir), "only apply to sim:// endpoints"));

    auto vocab = minimal(dir);
    vocab["tokenizer"] = {{"name", "vocab"}};
    CHECK(mentions(violations_of(vocab, dir), "needs a vocabulary file"));
}

TEST_CASE("loading from a file resolves paths next to it") {
    testing::TempDir dir("cfg-file");
    auto doc = minimal(dir);
    doc["datasets"][0]["path"] = "../cardio.jsonl";
    write_text_file(dir / "conf" / "run.json", doc.dump());
    const auto cfg = load_config(dir / "conf" / "run.json");
    CHECK(std::filesystem::equivalent(cfg.datasets[0].path, dir / "cardio.jsonl"));
    CHECK(cfg.canonical_json == json::parse(doc.dump()).dump());
    CHECK_THROWS_AS(load_config(dir / "absent.json"), ConfigError);
}
