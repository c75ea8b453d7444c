// SPDX-License-Identifier: Apache-2.0
#include "thinkbudget/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <regex>
#include <set>
#include <thread>
#include <tuple>

#include "thinkbudget/errors.hpp"

namespace thinkbudget {
namespace {

bool is_alnum(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9'); }
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }

// Reads "C", "B, C", "B and C", "(B)/(C)" starting at pos. Letters must stand
// alone: "Based" yields nothing.
std::string parse_letter_list(std::string_view text, std::size_t pos) {
    auto skip = [&](std::string_view chars) {
        while (pos < text.size() && chars.find(text[pos]) != std::string_view::npos) ++pos;
    };
    auto letter_at = [&](std::size_t p) {
        return p < text.size() && is_upper(text[p]) && (p + 1 == text.size() || !is_alnum(text[p + 1]));
    };

    std::string letters;
    skip(" \t:*([\"'");
    while (letter_at(pos)) {
        letters += text[pos++];
        const std::size_t mark = pos;
        skip(" \t*)]\"'");
        bool separated = false;
        if (pos < text.size() && (text[pos] == ',' || text[pos] == '/' || text[pos] == '&')) {
            ++pos;
            separated = true;
        } else if (text.substr(pos, 4) == "and ") {
            pos += 4;
            separated = true;
        }
        if (!separated) {
            pos = mark;
            break;
        }
        skip(" \t*([\"'");
    }
    return letters;
}

bool is_letter_list_line(std::string_view line) {
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r')) line.remove_suffix(1);
    if (!line.empty() && line.back() == '.') line.remove_suffix(1);
    if (line.empty()) return false;
    bool want_letter = true;
    for (char c : line) {
        if (c == ' ') continue;
        if (want_letter) {
            if (!LetterSet::valid_letter(c)) return false;
            want_letter = false;
        } else {
            if (c != ',') return false;
            want_letter = true;
        }
    }
    return !want_letter;
}

struct WorkItem {
    const ModelSpec* model;
    const std::string* dataset;
    BudgetSpec budget;
    const QuestionRecord* question;
};

} // namespace

LetterSet extract_answer(std::string_view answer_text, LetterSet allowed) {
    static const std::regex declaration(R"(answer(\s+is\b\s*:?|\s*:))", std::regex::ECMAScript);

    std::string lower(answer_text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });

    std::ptrdiff_t best_pos = -1;
    std::string best_letters;
    for (auto it = std::sregex_iterator(lower.begin(), lower.end(), declaration); it != std::sregex_iterator(); ++it) {
        const auto end = static_cast<std::size_t>(it->position() + it->length());
        auto letters = parse_letter_list(answer_text, end);
        if (!letters.empty() && it->position() > best_pos) {
            best_pos = it->position();
            best_letters = std::move(letters);
        }
    }

    std::size_t line_start = 0;
    while (line_start <= answer_text.size()) {
        auto nl = answer_text.find('\n', line_start);
        const auto line_end = nl == std::string_view::npos ? answer_text.size() : nl;
        const auto line = answer_text.substr(line_start, line_end - line_start);
        if (is_letter_list_line(line) && static_cast<std::ptrdiff_t>(line_start) > best_pos) {
            best_pos = static_cast<std::ptrdiff_t>(line_start);
            best_letters.clear();
            for (char c : line) {
                if (LetterSet::valid_letter(c)) best_letters += c;
            }
        }
        if (nl == std::string_view::npos) break;
        line_start = nl + 1;
    }

    LetterSet out;
    for (char c : best_letters) {
        if (LetterSet::valid_letter(c) && allowed.contains(c)) out.insert(c);
    }
    return out;
}

bool score(LetterSet extracted, LetterSet truth) { return !truth.empty() && extracted == truth; }

std::string_view to_string(RunMode mode) { return mode == RunMode::Native ? "Native" : "Truncation"; }

RunMode parse_run_mode(std::string_view text) {
    if (text == "Native" || text == "native") return RunMode::Native;
    if (text == "Truncation" || text == "truncation") return RunMode::Truncation;
    throw ValidationError("unknown mode '" + std::string(text) + "' (expected Native or Truncation)");
}

void RunPlan::validate() const {
    std::vector<std::string> problems;
    if (models.empty()) problems.emplace_back("plan has no models");
    if (datasets.empty()) problems.emplace_back("plan has no datasets");
    if (budgets.empty()) problems.emplace_back("plan has no budgets");
    if (parallelism < 1) problems.emplace_back("parallelism must be >= 1");
    std::set<BudgetSpec> seen_budgets;
    for (const auto& b : budgets) {
        if (!seen_budgets.insert(b).second) problems.push_back("duplicate budget '" + b.to_string() + "'");
    }
    std::set<std::string> names;
    for (const auto& m : models) {
        if (!names.insert(m.name).second) problems.push_back("duplicate model '" + m.name + "'");
        if (mode == RunMode::Native && !m.native_budget_support) {
            problems.push_back("model '" + m.name + "' has no native budget support; Native mode needs it");
        }
    }
    if (!problems.empty()) {
        std::string message = "invalid run plan:";
        for (const auto& p : problems) message += " " + p + ";";
        throw PlanError(message);
    }
}

std::string utc_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm parts{};
    gmtime_r(&now, &parts);
    char buffer[32];
    std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &parts);
    return buffer;
}

std::vector<ExperimentRecord> run_matrix(const RunPlan& plan, const QuestionSets& questions, const TraceStore& traces,
                                         const RunContext& context) {
    plan.validate();
    if (!context.backend_for) throw PlanError("run context has no backend resolver");

    std::vector<const ModelSpec*> models;
    for (const auto& m : plan.models) models.push_back(&m);
    std::sort(models.begin(), models.end(), [](auto* a, auto* b) { return a->name < b->name; });
    std::vector<std::string> datasets = plan.datasets;
    std::sort(datasets.begin(), datasets.end());
    datasets.erase(std::unique(datasets.begin(), datasets.end()), datasets.end());
    std::vector<BudgetSpec> budgets = plan.budgets;
    std::sort(budgets.begin(), budgets.end());
    budgets.erase(std::unique(budgets.begin(), budgets.end()), budgets.end());

    std::map<std::string, std::vector<const QuestionRecord*>> ordered;
    for (const auto& d : datasets) {
        auto it = questions.find(d);
        if (it == questions.end()) throw PlanError("dataset '" + d + "' has no loaded questions");
        auto& list = ordered[d];
        for (const auto& q : it->second) list.push_back(&q);
        std::sort(list.begin(), list.end(), [](auto* a, auto* b) { return a->id < b->id; });
    }

    const bool needs_traces = plan.mode == RunMode::Truncation || plan.native_reconstructs_prompt;
    if (needs_traces) {
        std::vector<std::string> missing;
        for (const auto* m : models) {
            for (const auto& d : datasets) {
                for (const auto* q : ordered[d]) {
                    if (!traces.contains({m->name, q->id})) missing.push_back(m->name + "/" + q->id);
                }
            }
        }
        if (!missing.empty()) {
            std::string message = "missing Stage-1 trace for " + std::to_string(missing.size()) + " (model, question) pair(s):";
            for (std::size_t i = 0; i < std::min<std::size_t>(missing.size(), 5); ++i) message += " " + missing[i];
            if (missing.size() > 5) message += " ...";
            throw PlanError(message);
        }
    }
    for (const auto* m : models) context.backend_for(*m);

    std::vector<WorkItem> items;
    for (const auto* m : models) {
        for (const auto& d : datasets) {
            for (const auto& b : budgets) {
                for (const auto* q : ordered[d]) items.push_back(WorkItem{m, &d, b, q});
            }
        }
    }

    std::vector<ExperimentRecord> records(items.size());
    auto run_one = [&](const WorkItem& item, ExperimentRecord& rec) {
        const ModelSpec& model = *item.model;
        const QuestionRecord& question = *item.question;
        rec.run_id = plan.run_id;
        rec.model = model.name;
        rec.dataset_id = *item.dataset;
        rec.question_id = question.id;
        rec.budget = item.budget;
        rec.created_at = context.clock ? context.clock() : utc_now();

        const BudgetSpec effective = effective_budget(item.budget, model);
        std::string injected;
        if (needs_traces) {
            const auto& trace = traces.at({model.name, question.id});
            injected = truncate_thinking(extract_think(trace.raw).thinking, effective, context.tokenizer);
        }
        const bool native = plan.mode == RunMode::Native;
        InferenceCall call{model, question, reconstruct_prompt(question, injected, context.prompt_template), effective,
                           native};
        rec.input_tokens = context.tokenizer.count(reconstruct_prompt(question, {}, context.prompt_template));

        const auto started = std::chrono::steady_clock::now();
        try {
            const ChatResponse response = context.backend_for(model).complete(call);
            const SplitResult split = extract_think(response.content);
            rec.extracted_answer = extract_answer(split.remainder, question.option_letters());
            rec.thinking_tokens = native ? context.tokenizer.count(split.thinking) : context.tokenizer.count(injected);
        } catch (const std::exception& e) {
            rec.extracted_answer = LetterSet{};
            rec.thinking_tokens = native ? 0 : context.tokenizer.count(injected);
            rec.error = e.what();
        }
        rec.correct = score(rec.extracted_answer, question.ground_truth);
        if (context.record_latency) {
            rec.latency_ms = static_cast<std::uint64_t>(
                std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started)
                    .count());
        }
    };

    const auto workers = static_cast<std::size_t>(std::max(1, plan.parallelism));
    if (workers == 1 || items.size() <= 1) {
        for (std::size_t i = 0; i < items.size(); ++i) run_one(items[i], records[i]);
        return records;
    }
    std::atomic<std::size_t> next{0};
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < std::min(workers, items.size()); ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < items.size(); i = next.fetch_add(1)) {
                    run_one(items[i], records[i]);
                }
            });
        }
    }
    return records;
}

std::vector<AccuracySummary> aggregate(const std::vector<ExperimentRecord>& records) {
    struct Tally {
        std::uint64_t correct = 0;
        std::uint64_t n = 0;
        double thinking_sum = 0.0;
    };
    std::map<std::tuple<std::string, std::string, BudgetSpec>, Tally> groups;
    for (const auto& r : records) {
        auto& t = groups[{r.model, r.dataset_id, r.budget}];
        t.n += 1;
        t.correct += r.correct ? 1 : 0;
        t.thinking_sum += static_cast<double>(r.thinking_tokens);
    }
    std::vector<AccuracySummary> out;
    out.reserve(groups.size());
    for (const auto& [key, t] : groups) {
        const auto& [model, dataset, budget] = key;
        out.push_back(AccuracySummary{model, dataset, budget, static_cast<double>(t.correct) / static_cast<double>(t.n),
                                      t.correct, t.n, t.thinking_sum / static_cast<double>(t.n)});
    }
    return out;
}

double delta_performance(const AccuracySummary& at, const AccuracySummary& baseline) {
    if (!baseline.budget.is_none()) throw DomainError("delta_performance: baseline budget must be none");
    if (at.model != baseline.model || at.dataset_id != baseline.dataset_id) {
        throw DomainError("delta_performance: summaries belong to different (model, dataset) pairs");
    }
    return at.accuracy - baseline.accuracy;
}

double thinking_ratio(const ReasoningTrace& trace) {
    if (trace.input_tokens == 0) throw DomainError("thinking_ratio: input_tokens is 0, ratio undefined");
    return static_cast<double>(trace.thinking_tokens) / static_cast<double>(trace.input_tokens);
}

} // namespace thinkbudget
