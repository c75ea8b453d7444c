// SPDX-License-Identifier: Apache-2.0
#include "thinkbudget/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "thinkbudget/errors.hpp"
#include "thinkbudget/tokenizer.hpp"
#include "thinkbudget/truncation.hpp"

namespace thinkbudget {
namespace {

using json = nlohmann::json;

// Collects every problem in the document instead of stopping at the first.
class Checker {
public:
    void fail(const std::string& pointer, const std::string& message) {
        problems_.push_back((pointer.empty() ? std::string("/") : pointer) + ": " + message);
    }
    bool ok() const { return problems_.empty(); }
    std::vector<std::string> take() { return std::move(problems_); }

    void reject_unknown(const json& object, const std::string& pointer, std::initializer_list<std::string_view> known) {
        for (const auto& [key, value] : object.items()) {
            bool found = false;
            for (auto k : known) found = found || key == k;
            if (!found) fail(pointer + "/" + key, "unknown key");
        }
    }

    const json* member(const json& object, const std::string& pointer, std::string_view key, bool required) {
        auto it = object.find(key);
        if (it == object.end()) {
            if (required) fail(pointer + "/" + std::string(key), "required key is missing");
            return nullptr;
        }
        return &*it;
    }

    std::optional<std::string> string_at(const json& object, const std::string& pointer, std::string_view key,
                                         bool required) {
        const json* v = member(object, pointer, key, required);
        if (!v) return std::nullopt;
        if (!v->is_string()) {
            fail(pointer + "/" + std::string(key), "expected a string");
            return std::nullopt;
        }
        return v->get<std::string>();
    }

    std::optional<double> number_at(const json& object, const std::string& pointer, std::string_view key,
                                    bool required) {
        const json* v = member(object, pointer, key, required);
        if (!v) return std::nullopt;
        if (!v->is_number()) {
            fail(pointer + "/" + std::string(key), "expected a number");
            return std::nullopt;
        }
        return v->get<double>();
    }

    std::optional<std::int64_t> integer_at(const json& object, const std::string& pointer, std::string_view key,
                                           bool required) {
        const json* v = member(object, pointer, key, required);
        if (!v) return std::nullopt;
        if (!v->is_number_integer()) {
            fail(pointer + "/" + std::string(key), "expected an integer");
            return std::nullopt;
        }
        return v->get<std::int64_t>();
    }

    std::optional<bool> bool_at(const json& object, const std::string& pointer, std::string_view key) {
        const json* v = member(object, pointer, key, false);
        if (!v) return std::nullopt;
        if (!v->is_boolean()) {
            fail(pointer + "/" + std::string(key), "expected true or false");
            return std::nullopt;
        }
        return v->get<bool>();
    }

    bool expect_object(const json& value, const std::string& pointer) {
        if (value.is_object()) return true;
        fail(pointer, "expected an object");
        return false;
    }

    bool expect_array(const json& value, const std::string& pointer) {
        if (value.is_array()) return true;
        fail(pointer, "expected an array");
        return false;
    }

private:
    std::vector<std::string> problems_;
};

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte_offset) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t end = std::min(byte_offset, text.size());
    for (std::size_t i = 0; i < end; ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
    std::filesystem::path p(value);
    return p.is_absolute() ? p : (base / p).lexically_normal();
}

EndpointConfig parse_endpoint(Checker& check, const std::string& id, const json& node, const std::string& ptr) {
    EndpointConfig e;
    e.id = id;
    if (!check.expect_object(node, ptr)) return e;
    check.reject_unknown(node, ptr,
                         {"base_url", "auth_env_var", "budget_field", "timeout_s", "max_attempts", "backoff_base_ms",
                          "max_in_flight", "temperature"});
    if (auto v = check.string_at(node, ptr, "base_url", true)) {
        e.base_url = *v;
        const bool http = v->rfind("http://", 0) == 0 || v->rfind("https://", 0) == 0;
        if (!http && v->rfind(kSimulatedScheme, 0) != 0) {
            check.fail(ptr + "/base_url", "expected an http://, https:// or sim:// URL");
        }
    }
    if (auto v = check.string_at(node, ptr, "auth_env_var", false)) e.auth_env_var = *v;
    if (auto v = check.string_at(node, ptr, "budget_field", false)) {
        if (v->empty()) check.fail(ptr + "/budget_field", "must not be empty");
        e.budget_field = *v;
    }
    if (auto v = check.number_at(node, ptr, "timeout_s", false)) {
        if (!(*v > 0.0)) check.fail(ptr + "/timeout_s", "must be positive");
        else e.timeout = std::chrono::milliseconds(static_cast<std::int64_t>(std::llround(*v * 1000.0)));
    }
    if (auto v = check.integer_at(node, ptr, "max_attempts", false)) {
        if (*v < 1) check.fail(ptr + "/max_attempts", "must be >= 1");
        else e.max_attempts = static_cast<int>(*v);
    }
    if (auto v = check.integer_at(node, ptr, "backoff_base_ms", false)) {
        if (*v < 0) check.fail(ptr + "/backoff_base_ms", "must be >= 0");
        else e.backoff_base = std::chrono::milliseconds(*v);
    }
    if (auto v = check.integer_at(node, ptr, "max_in_flight", false)) {
        if (*v < 1 || *v > 1024) check.fail(ptr + "/max_in_flight", "must lie in [1, 1024]");
        else e.max_in_flight = static_cast<int>(*v);
    }
    if (auto v = check.number_at(node, ptr, "temperature", false)) {
        if (!(*v >= 0.0)) check.fail(ptr + "/temperature", "must be >= 0");
        else e.temperature = *v;
    }
    return e;
}

SimulationParams parse_simulation(Checker& check, const json& node, const std::string& ptr) {
    SimulationParams s;
    if (!check.expect_object(node, ptr)) return s;
    check.reject_unknown(node, ptr, {"alpha", "beta", "gamma", "noise_sigma", "ratio_min", "ratio_max"});
    if (auto v = check.number_at(node, ptr, "alpha", false)) s.alpha = *v;
    if (auto v = check.number_at(node, ptr, "beta", false)) s.beta = *v;
    if (auto v = check.number_at(node, ptr, "gamma", false)) s.gamma = *v;
    if (auto v = check.number_at(node, ptr, "noise_sigma", false)) {
        if (!(*v >= 0.0)) check.fail(ptr + "/noise_sigma", "must be >= 0");
        s.noise_sigma = *v;
    }
    if (auto v = check.number_at(node, ptr, "ratio_min", false)) s.ratio_min = *v;
    if (auto v = check.number_at(node, ptr, "ratio_max", false)) s.ratio_max = *v;
    if (!(s.ratio_min > 0.0 && s.ratio_min <= s.ratio_max)) check.fail(ptr, "need 0 < ratio_min <= ratio_max");
    return s;
}

ModelConfig parse_model(Checker& check, const json& node, const std::string& ptr) {
    ModelConfig m;
    if (!check.expect_object(node, ptr)) return m;
    check.reject_unknown(node, ptr,
                         {"name", "family", "size_billions", "native_budget_support", "max_thinking_tokens", "endpoint",
                          "simulation"});
    if (auto v = check.string_at(node, ptr, "name", true)) {
        if (v->empty()) check.fail(ptr + "/name", "must not be empty");
        m.spec.name = *v;
    }
    if (auto v = check.string_at(node, ptr, "family", false)) m.spec.family = *v;
    if (auto v = check.number_at(node, ptr, "size_billions", true)) {
        if (!(*v > 0.0)) check.fail(ptr + "/size_billions", "must be positive");
        m.spec.size_billions = *v;
    }
    if (auto v = check.bool_at(node, ptr, "native_budget_support")) m.spec.native_budget_support = *v;
    if (auto v = check.integer_at(node, ptr, "max_thinking_tokens", false)) {
        if (*v < 1) check.fail(ptr + "/max_thinking_tokens", "must be >= 1");
        else m.spec.max_thinking_tokens = static_cast<std::uint64_t>(*v);
    }
    if (auto v = check.string_at(node, ptr, "endpoint", true)) m.spec.endpoint_ref = *v;
    if (const json* sim = check.member(node, ptr, "simulation", false)) {
        m.simulation = parse_simulation(check, *sim, ptr + "/simulation");
    }
    return m;
}

std::vector<BudgetSpec> parse_budgets(Checker& check, const json& node, const std::string& ptr) {
    std::vector<BudgetSpec> out;
    if (!check.expect_array(node, ptr)) return out;
    if (node.empty()) check.fail(ptr, "budget list must not be empty");
    std::set<BudgetSpec> seen;
    for (std::size_t i = 0; i < node.size(); ++i) {
        const std::string item_ptr = ptr + "/" + std::to_string(i);
        const json& item = node[i];
        try {
            BudgetSpec b;
            if (item.is_number_integer() && item.get<std::int64_t>() >= 0) {
                b = BudgetSpec::tokens(item.get<std::uint64_t>());
            } else if (item.is_string()) {
                b = BudgetSpec::parse(item.get<std::string>());
            } else {
                check.fail(item_ptr, "expected \"none\", \"inf\" or a nonnegative token count");
                continue;
            }
            if (!seen.insert(b).second) check.fail(item_ptr, "duplicate budget " + b.to_string());
            out.push_back(b);
        } catch (const ValidationError& e) {
            check.fail(item_ptr, e.what());
        }
    }
    return out;
}

} // namespace

bool is_simulated_endpoint(const EndpointConfig& endpoint) {
    return endpoint.base_url.rfind(kSimulatedScheme, 0) == 0;
}

const ModelConfig* RunConfig::find_model(std::string_view name) const {
    for (const auto& m : models) {
        if (m.spec.name == name) return &m;
    }
    return nullptr;
}

RunPlan RunConfig::plan() const {
    RunPlan p;
    p.run_id = run_id;
    for (const auto& m : models) p.models.push_back(m.spec);
    for (const auto& d : datasets) p.datasets.push_back(d.id);
    p.budgets = budgets;
    p.mode = mode;
    p.parallelism = parallelism;
    p.seed = seed;
    p.native_reconstructs_prompt = native_reconstructs_prompt;
    return p;
}

RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir, std::string_view source_name) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const auto [line, column] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
        std::string what = e.what();
        if (auto pos = what.find("syntax error"); pos != std::string::npos) what = what.substr(pos);
        throw ConfigError(std::string(source_name) + ":" + std::to_string(line) + ":" + std::to_string(column) +
                          ": parse error: " + what);
    }

    Checker check;
    RunConfig cfg;
    cfg.canonical_json = doc.dump();
    if (!doc.is_object()) throw ConfigError(std::string(source_name) + ": top level must be an object");

    check.reject_unknown(doc, "",
                         {"run_id", "endpoints", "models", "datasets", "budgets", "mode", "template_path", "tokenizer",
                          "parallelism", "seed", "output_dir", "native_prompt"});

    if (const json* endpoints = check.member(doc, "", "endpoints", true); endpoints && check.expect_object(*endpoints, "/endpoints")) {
        for (const auto& [id, node] : endpoints->items()) {
            cfg.endpoints.emplace(id, parse_endpoint(check, id, node, "/endpoints/" + id));
        }
    }

    if (const json* models = check.member(doc, "", "models", true); models && check.expect_array(*models, "/models")) {
        if (models->empty()) check.fail("/models", "at least one model is required");
        std::set<std::string> names;
        for (std::size_t i = 0; i < models->size(); ++i) {
            const std::string ptr = "/models/" + std::to_string(i);
            ModelConfig m = parse_model(check, (*models)[i], ptr);
            if (!m.spec.name.empty() && !names.insert(m.spec.name).second) {
                check.fail(ptr + "/name", "duplicate model name '" + m.spec.name + "'");
            }
            cfg.models.push_back(std::move(m));
        }
    }

    if (const json* datasets = check.member(doc, "", "datasets", true);
        datasets && check.expect_array(*datasets, "/datasets")) {
        if (datasets->empty()) check.fail("/datasets", "at least one dataset is required");
        std::set<std::string> ids;
        for (std::size_t i = 0; i < datasets->size(); ++i) {
            const std::string ptr = "/datasets/" + std::to_string(i);
            const json& node = (*datasets)[i];
            if (!check.expect_object(node, ptr)) continue;
            check.reject_unknown(node, ptr, {"id", "path"});
            DatasetRef d;
            if (auto v = check.string_at(node, ptr, "id", true)) {
                d.id = *v;
                if (!ids.insert(d.id).second) check.fail(ptr + "/id", "duplicate dataset id '" + d.id + "'");
            }
            if (auto v = check.string_at(node, ptr, "path", true)) {
                d.path = resolve(base_dir, *v);
                if (!std::filesystem::is_regular_file(d.path)) {
                    check.fail(ptr + "/path", "dataset file not found: " + d.path.string());
                }
            }
            cfg.datasets.push_back(std::move(d));
        }
    }

    if (const json* budgets = check.member(doc, "", "budgets", false)) {
        cfg.budgets = parse_budgets(check, *budgets, "/budgets");
    } else {
        cfg.budgets = budget_ladder();
    }

    if (auto v = check.string_at(doc, "", "mode", false)) {
        try {
            cfg.mode = parse_run_mode(*v);
        } catch (const ValidationError& e) {
            check.fail("/mode", e.what());
        }
    }

    if (auto v = check.string_at(doc, "", "template_path", false)) {
        cfg.template_path = resolve(base_dir, *v);
        if (!std::filesystem::is_regular_file(*cfg.template_path)) {
            check.fail("/template_path", "template file not found: " + cfg.template_path->string());
        } else {
            try {
                (void)PromptTemplate::from_file(*cfg.template_path);
            } catch (const TemplateError& e) {
                check.fail("/template_path", e.what());
            }
        }
    }

    if (const json* tok = check.member(doc, "", "tokenizer", false); tok && check.expect_object(*tok, "/tokenizer")) {
        check.reject_unknown(*tok, "/tokenizer", {"name", "vocab_ref"});
        if (auto v = check.string_at(*tok, "/tokenizer", "name", true)) cfg.tokenizer.name = *v;
        if (auto v = check.string_at(*tok, "/tokenizer", "vocab_ref", false)) {
            cfg.tokenizer.vocab_ref = resolve(base_dir, *v);
            if (!std::filesystem::is_regular_file(*cfg.tokenizer.vocab_ref)) {
                check.fail("/tokenizer/vocab_ref", "vocabulary file not found: " + cfg.tokenizer.vocab_ref->string());
            }
        }
        if (cfg.tokenizer.name != Tokenizer::kWhitespace && cfg.tokenizer.name != Tokenizer::kVocab) {
            check.fail("/tokenizer/name", "unknown tokenizer '" + cfg.tokenizer.name + "' (expected whitespace or vocab)");
        } else if (cfg.tokenizer.name == Tokenizer::kVocab && !cfg.tokenizer.vocab_ref) {
            check.fail("/tokenizer/vocab_ref", "the vocab tokenizer needs a vocabulary file");
        }
    }

    if (auto v = check.integer_at(doc, "", "parallelism", false)) {
        if (*v < 1 || *v > 1024) check.fail("/parallelism", "must lie in [1, 1024]");
        else cfg.parallelism = static_cast<int>(*v);
    }
    if (const json* v = check.member(doc, "", "seed", false)) {
        if (v->is_number_unsigned()) cfg.seed = v->get<std::uint64_t>();
        else if (v->is_number_integer()) check.fail("/seed", "must be >= 0");
        else check.fail("/seed", "expected an integer");
    }
    cfg.output_dir = resolve(base_dir, check.string_at(doc, "", "output_dir", false).value_or("out"));
    cfg.run_id = check.string_at(doc, "", "run_id", false).value_or("run-" + std::to_string(cfg.seed));

    if (auto v = check.string_at(doc, "", "native_prompt", false)) {
        if (*v == "bare") cfg.native_reconstructs_prompt = false;
        else if (*v == "reconstructed") cfg.native_reconstructs_prompt = true;
        else check.fail("/native_prompt", "expected \"bare\" or \"reconstructed\"");
    }

    // Cross-field rules.
    for (std::size_t i = 0; i < cfg.models.size(); ++i) {
        const auto& m = cfg.models[i];
        const std::string ptr = "/models/" + std::to_string(i);
        if (m.spec.endpoint_ref.empty()) continue;
        auto it = cfg.endpoints.find(m.spec.endpoint_ref);
        if (it == cfg.endpoints.end()) {
            check.fail(ptr + "/endpoint", "unknown endpoint '" + m.spec.endpoint_ref + "'");
            continue;
        }
        const bool simulated = is_simulated_endpoint(it->second);
        if (simulated && !m.simulation) {
            check.fail(ptr + "/simulation", "model '" + m.spec.name + "' uses a sim:// endpoint but has no simulation block");
        }
        if (!simulated && m.simulation) {
            check.fail(ptr + "/simulation", "simulation parameters only apply to sim:// endpoints");
        }
        if (cfg.mode == RunMode::Native && !m.spec.native_budget_support) {
            check.fail(ptr + "/native_budget_support",
                       "model '" + m.spec.name + "' lacks native budget support, which Native mode requires");
        }
    }

    if (!check.ok()) {
        auto problems = check.take();
        for (auto& p : problems) p = std::string(source_name) + ": " + p;
        throw ConfigError(std::move(problems));
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const auto base = std::filesystem::absolute(path).parent_path();
    return parse_config(buffer.str(), base, path.string());
}

} // namespace thinkbudget
