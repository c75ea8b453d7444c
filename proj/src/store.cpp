// SPDX-License-Identifier: Apache-2.0
#include "thinkbudget/store.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include <json.hpp>

#include "thinkbudget/errors.hpp"

namespace thinkbudget {
namespace {

using ojson = nlohmann::ordered_json;

constexpr std::size_t kExcerptChars = 80;

std::string excerpt(std::string_view line) {
    if (line.size() <= kExcerptChars) return std::string(line);
    return std::string(line.substr(0, kExcerptChars)) + "...";
}

ojson letters_json(LetterSet set) {
    ojson out = ojson::array();
    for (char c = LetterSet::kFirst; c <= LetterSet::kLast; ++c) {
        if (set.contains(c)) out.push_back(std::string(1, c));
    }
    return out;
}

LetterSet letters_from_json(const ojson& value) {
    if (value.is_string()) return LetterSet::parse(value.get<std::string>());
    LetterSet out;
    for (const auto& item : value) {
        const auto s = item.get<std::string>();
        if (s.size() != 1) throw ValidationError("answer letter '" + s + "' is not a single letter");
        out.insert(s[0]);
    }
    return out;
}

BudgetSpec budget_from_json(const ojson& value) {
    if (value.is_number_unsigned()) return BudgetSpec::tokens(value.get<std::uint64_t>());
    return BudgetSpec::parse(value.get<std::string>());
}

template <typename Decode>
auto read_jsonl(const std::filesystem::path& path, bool strict_framing, Decode decode) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StoreError("cannot open " + path.string(), 0);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();

    std::vector<decltype(decode(std::string_view{}))> out;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
        ++line_no;
        const auto nl = text.find('\n', pos);
        const bool terminated = nl != std::string::npos;
        std::string_view line(text.data() + pos, (terminated ? nl : text.size()) - pos);
        pos = terminated ? nl + 1 : text.size();
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() && !strict_framing) continue;
        if (strict_framing && !terminated) {
            throw StoreError(path.string() + ":" + std::to_string(line_no) +
                                 ": truncated final line (no newline): " + excerpt(line),
                             line_no);
        }
        try {
            out.push_back(decode(line));
        } catch (const std::exception& e) {
            throw StoreError(path.string() + ":" + std::to_string(line_no) + ": " + e.what() + " in: " + excerpt(line),
                             line_no);
        }
    }
    return out;
}

void ensure_parent(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
}

std::string format_fixed(double value, int decimals) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.*f", decimals, value);
    return buffer;
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

} // namespace

TraceStoreEntry make_trace_entry(const std::string& model, const std::string& question_id, const ReasoningTrace& trace,
                                 std::string created_at) {
    return TraceStoreEntry{model,
                           question_id,
                           trace.raw,
                           trace.thinking,
                           trace.thinking_tokens,
                           trace.input_tokens,
                           std::move(created_at),
                           trace.thinking.empty() || trace.thinking_tokens == 0};
}

ReasoningTrace to_reasoning_trace(const TraceStoreEntry& entry) {
    ReasoningTrace trace;
    trace.raw = entry.raw;
    trace.thinking = entry.thinking;
    trace.answer_text = extract_think(entry.raw).remainder;
    trace.thinking_tokens = entry.thinking_tokens;
    trace.input_tokens = entry.input_tokens;
    trace.had_think_tags = entry.raw.find(kThinkOpen) != std::string::npos;
    return trace;
}

std::string encode_record(const ExperimentRecord& r) {
    ojson j;
    j["run_id"] = r.run_id;
    j["model"] = r.model;
    j["dataset_id"] = r.dataset_id;
    j["question_id"] = r.question_id;
    j["budget"] = r.budget.to_string();
    j["extracted_answer"] = letters_json(r.extracted_answer);
    j["correct"] = r.correct;
    j["thinking_tokens"] = r.thinking_tokens;
    j["input_tokens"] = r.input_tokens;
    j["latency_ms"] = r.latency_ms;
    j["created_at"] = r.created_at;
    if (r.error) j["error"] = *r.error;
    return j.dump();
}

ExperimentRecord decode_record(std::string_view line) {
    const auto j = ojson::parse(line);
    ExperimentRecord r;
    r.run_id = j.at("run_id").get<std::string>();
    r.model = j.at("model").get<std::string>();
    r.dataset_id = j.at("dataset_id").get<std::string>();
    r.question_id = j.at("question_id").get<std::string>();
    r.budget = budget_from_json(j.at("budget"));
    r.extracted_answer = letters_from_json(j.at("extracted_answer"));
    r.correct = j.at("correct").get<bool>();
    r.thinking_tokens = j.at("thinking_tokens").get<std::uint64_t>();
    r.input_tokens = j.at("input_tokens").get<std::uint64_t>();
    r.latency_ms = j.at("latency_ms").get<std::uint64_t>();
    r.created_at = j.at("created_at").get<std::string>();
    if (auto it = j.find("error"); it != j.end()) r.error = it->get<std::string>();
    return r;
}

std::string encode_trace(const TraceStoreEntry& e) {
    ojson j;
    j["model"] = e.model;
    j["question_id"] = e.question_id;
    j["raw"] = e.raw;
    j["thinking"] = e.thinking;
    j["thinking_tokens"] = e.thinking_tokens;
    j["input_tokens"] = e.input_tokens;
    j["created_at"] = e.created_at;
    j["empty_thinking"] = e.empty_thinking;
    return j.dump();
}

TraceStoreEntry decode_trace(std::string_view line) {
    const auto j = ojson::parse(line);
    TraceStoreEntry e;
    e.model = j.at("model").get<std::string>();
    e.question_id = j.at("question_id").get<std::string>();
    e.raw = j.at("raw").get<std::string>();
    e.thinking = j.at("thinking").get<std::string>();
    e.thinking_tokens = j.at("thinking_tokens").get<std::uint64_t>();
    e.input_tokens = j.at("input_tokens").get<std::uint64_t>();
    e.created_at = j.at("created_at").get<std::string>();
    e.empty_thinking = j.value("empty_thinking", false);
    return e;
}

std::string encode_question(const QuestionRecord& q) {
    ojson j;
    j["id"] = q.id;
    j["dataset_id"] = q.dataset_id;
    j["stem"] = q.stem;
    ojson options = ojson::object();
    for (const auto& [letter, text] : q.options) options[std::string(1, letter)] = text;
    j["options"] = std::move(options);
    j["ground_truth"] = letters_json(q.ground_truth);
    j["tier"] = std::string(to_string(q.tier));
    j["specialty"] = q.specialty;
    return j.dump();
}

QuestionRecord decode_question(std::string_view line, std::string_view dataset_id) {
    const auto j = ojson::parse(line);
    QuestionRecord q;
    q.id = j.at("id").get<std::string>();
    q.dataset_id = j.contains("dataset_id") ? j.at("dataset_id").get<std::string>() : std::string(dataset_id);
    q.stem = j.at("stem").get<std::string>();
    for (const auto& [key, value] : j.at("options").items()) {
        if (key.size() != 1) throw ValidationError("option key '" + key + "' is not a single letter");
        q.options.emplace(key[0], value.get<std::string>());
    }
    q.ground_truth = letters_from_json(j.at("ground_truth"));
    q.tier = parse_tier(j.value("tier", std::string("Other")));
    q.specialty = j.value("specialty", std::string());
    q.validate();
    return q;
}

JsonlWriter::JsonlWriter(const std::filesystem::path& path, Mode mode) : path_(path) {
    ensure_parent(path);
    out_.open(path, std::ios::binary | (mode == Mode::Append ? std::ios::app : std::ios::trunc));
    if (!out_) throw StoreError("cannot open " + path.string() + " for writing", 0);
}

void JsonlWriter::write_line(std::string_view line) {
    std::lock_guard lock(mutex_);
    out_ << line << '\n';
    out_.flush();
    if (!out_) throw StoreError("write to " + path_.string() + " failed", 0);
}

void append_records(const std::filesystem::path& path, std::span<const ExperimentRecord> records) {
    JsonlWriter writer(path);
    for (const auto& r : records) writer.write_line(encode_record(r));
}

std::vector<ExperimentRecord> load_records(const std::filesystem::path& path) {
    return read_jsonl(path, true, [](std::string_view line) { return decode_record(line); });
}

void append_traces(const std::filesystem::path& path, std::span<const TraceStoreEntry> entries) {
    JsonlWriter writer(path);
    for (const auto& e : entries) writer.write_line(encode_trace(e));
}

std::vector<TraceStoreEntry> load_traces(const std::filesystem::path& path) {
    auto entries = read_jsonl(path, true, [](std::string_view line) { return decode_trace(line); });
    std::set<std::pair<std::string, std::string>> seen;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (!seen.insert({entries[i].model, entries[i].question_id}).second) {
            throw StoreError(path.string() + ":" + std::to_string(i + 1) + ": duplicate trace for (" +
                                 entries[i].model + ", " + entries[i].question_id + ")",
                             i + 1);
        }
    }
    return entries;
}

TraceStore to_trace_store(std::span<const TraceStoreEntry> entries) {
    TraceStore store;
    for (const auto& e : entries) store.emplace(std::make_pair(e.model, e.question_id), to_reasoning_trace(e));
    return store;
}

void write_questions(const std::filesystem::path& path, std::span<const QuestionRecord> questions) {
    JsonlWriter writer(path, JsonlWriter::Mode::Truncate);
    for (const auto& q : questions) writer.write_line(encode_question(q));
}

std::vector<QuestionRecord> load_questions(const std::filesystem::path& path, std::string_view dataset_id) {
    return read_jsonl(path, false, [&](std::string_view line) { return decode_question(line, dataset_id); });
}

std::string csv_field(std::string_view text) {
    if (text.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(text);
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string summary_csv(std::span<const AccuracySummary> summaries) {
    std::vector<const AccuracySummary*> rows;
    for (const auto& s : summaries) rows.push_back(&s);
    std::sort(rows.begin(), rows.end(), [](auto* a, auto* b) {
        return std::tie(a->model, a->dataset_id, a->budget) < std::tie(b->model, b->dataset_id, b->budget);
    });
    std::string out(kSummaryCsvHeader);
    out += '\n';
    for (const auto* s : rows) {
        out += csv_field(s->model);
        out += ',';
        out += csv_field(s->dataset_id);
        out += ',';
        out += s->budget.to_string();
        out += ',';
        out += format_fixed(s->accuracy, 4);
        out += ',';
        out += std::to_string(s->n);
        out += ',';
        out += format_fixed(s->mean_thinking_tokens, 2);
        out += '\n';
    }
    return out;
}

void export_summary_csv(std::span<const AccuracySummary> summaries, const std::filesystem::path& path) {
    write_text_file(path, summary_csv(summaries));
}

std::vector<AccuracySummary> load_summary_csv(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    std::vector<AccuracySummary> out;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1) {
            if (line != kSummaryCsvHeader) throw StoreError(path.string() + ":1: unexpected header: " + excerpt(line), 1);
            continue;
        }
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 6) throw StoreError(path.string() + ":" + std::to_string(line_no) + ": expected 6 fields", line_no);
        try {
            AccuracySummary s;
            s.model = f[0];
            s.dataset_id = f[1];
            s.budget = BudgetSpec::parse(f[2]);
            s.accuracy = std::stod(f[3]);
            s.n = std::stoull(f[4]);
            s.mean_thinking_tokens = std::stod(f[5]);
            s.correct = static_cast<std::uint64_t>(std::llround(s.accuracy * static_cast<double>(s.n)));
            out.push_back(std::move(s));
        } catch (const std::exception& e) {
            throw StoreError(path.string() + ":" + std::to_string(line_no) + ": " + e.what() + " in: " + excerpt(line),
                             line_no);
        }
    }
    return out;
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
    ensure_parent(path);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw StoreError("cannot open " + path.string() + " for writing", 0);
    out << contents;
    if (!out) throw StoreError("write to " + path.string() + " failed", 0);
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StoreError("cannot open " + path.string(), 0);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

} // namespace thinkbudget
