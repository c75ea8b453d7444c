// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "thinkbudget/domain.hpp"
#include "thinkbudget/runner.hpp"

namespace thinkbudget {

/// One Stage-1 trace as persisted. (model, question_id) is unique per store.
struct TraceStoreEntry {
    std::string model;
    std::string question_id;
    std::string raw;
    std::string thinking;
    std::uint64_t thinking_tokens = 0;
    std::uint64_t input_tokens = 0;
    std::string created_at;
    /// The model produced no thinking (missing tags or empty span).
    bool empty_thinking = false;

    bool operator==(const TraceStoreEntry&) const = default;
};

TraceStoreEntry make_trace_entry(const std::string& model, const std::string& question_id, const ReasoningTrace& trace,
                                 std::string created_at);
ReasoningTrace to_reasoning_trace(const TraceStoreEntry& entry);

std::string encode_record(const ExperimentRecord& record);
ExperimentRecord decode_record(std::string_view line);
std::string encode_trace(const TraceStoreEntry& entry);
TraceStoreEntry decode_trace(std::string_view line);
std::string encode_question(const QuestionRecord& question);
/// `dataset_id` fills the field when the line omits it.
QuestionRecord decode_question(std::string_view line, std::string_view dataset_id = {});

/// Line-oriented writer; each line is flushed as soon as it is written.
/// Calls from several threads are serialised.
class JsonlWriter {
public:
    enum class Mode { Append, Truncate };

    explicit JsonlWriter(const std::filesystem::path& path, Mode mode = Mode::Append);
    void write_line(std::string_view line);

private:
    std::mutex mutex_;
    std::ofstream out_;
    std::filesystem::path path_;
};

void append_records(const std::filesystem::path& path, std::span<const ExperimentRecord> records);
/// Throws StoreError with the 1-based line number and an excerpt on a
/// malformed line, including a final line missing its newline.
std::vector<ExperimentRecord> load_records(const std::filesystem::path& path);

void append_traces(const std::filesystem::path& path, std::span<const TraceStoreEntry> entries);
/// Also rejects a repeated (model, question_id) pair.
std::vector<TraceStoreEntry> load_traces(const std::filesystem::path& path);
TraceStore to_trace_store(std::span<const TraceStoreEntry> entries);

void write_questions(const std::filesystem::path& path, std::span<const QuestionRecord> questions);
/// Dataset JSONL; blank lines are skipped and the final newline is optional.
std::vector<QuestionRecord> load_questions(const std::filesystem::path& path, std::string_view dataset_id = {});

inline constexpr std::string_view kSummaryCsvHeader = "model,dataset,budget,accuracy,n,mean_thinking_tokens";

/// Header plus one row per summary sorted by (model, dataset, budget),
/// accuracy with 4 decimals and mean thinking tokens with 2.
std::string summary_csv(std::span<const AccuracySummary> summaries);
void export_summary_csv(std::span<const AccuracySummary> summaries, const std::filesystem::path& path);
std::vector<AccuracySummary> load_summary_csv(const std::filesystem::path& path);

/// Quotes a CSV field when it holds a comma, quote or newline.
std::string csv_field(std::string_view text);

void write_text_file(const std::filesystem::path& path, std::string_view contents);
std::string read_text_file(const std::filesystem::path& path);

} // namespace thinkbudget
