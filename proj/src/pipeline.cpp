// SPDX-License-Identifier: Apache-2.0
#include "thinkbudget/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "thinkbudget/backend.hpp"
#include "thinkbudget/errors.hpp"
#include "thinkbudget/manifest.hpp"
#include "thinkbudget/questions.hpp"
#include "thinkbudget/store.hpp"
#include "thinkbudget/truncation.hpp"

namespace thinkbudget {
namespace {

using ojson = nlohmann::ordered_json;

constexpr std::string_view kFrozenClock = "1970-01-01T00:00:00Z";

void say(const PipelineOptions& options, const std::string& message) {
    if (options.log) *options.log << message << '\n';
}

std::filesystem::path out_file(const RunConfig& config, std::string_view name) { return config.output_dir / name; }

void guard_outputs(const std::vector<std::filesystem::path>& paths, bool force) {
    for (const auto& p : paths) {
        if (!std::filesystem::exists(p)) continue;
        if (!force) throw ConfigError("refusing to overwrite " + p.string() + " (pass --force to replace it)");
        std::filesystem::remove(p);
    }
}

std::filesystem::path manifest_path(const RunConfig& config, std::string_view command) {
    return config.output_dir / ("manifest." + std::string(command) + ".json");
}

Manifest start_manifest(const RunConfig& config, std::string command) {
    Manifest m;
    m.command = std::move(command);
    m.run_id = config.run_id;
    m.config_hash = sha256_hex(config.canonical_json);
    m.seed = config.seed;
    return m;
}

// Runs fn(i) for i in [0, n) on up to `workers` threads and rethrows the
// first exception once every worker has stopped.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(n);
            }
        }
    };
    const auto count = std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), std::max<std::size_t>(n, 1));
    if (count == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < count; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
}

// Everything loaded from a config before a command runs.
class Resources {
public:
    Resources(const RunConfig& config, const PipelineOptions& options)
        : tokenizer_(Tokenizer::load(config.tokenizer.name, config.tokenizer.vocab_ref)),
          template_(config.template_path ? PromptTemplate::from_file(*config.template_path)
                                         : PromptTemplate::default_template()),
          simulated_(tokenizer_, template_) {
        std::set<std::string> seen_ids;
        for (const auto& d : config.datasets) {
            auto list = load_questions(d.path, d.id);
            if (list.empty()) throw ConfigError("dataset '" + d.id + "' (" + d.path.string() + ") holds no questions");
            for (auto& q : list) {
                q.dataset_id = d.id;
                if (!seen_ids.insert(q.id).second) {
                    throw ConfigError("question id '" + q.id + "' appears more than once across datasets");
                }
            }
            questions_.emplace(d.id, std::move(list));
        }

        std::shared_ptr<Transport> transport = options.transport;
        for (const auto& m : config.models) {
            const auto& endpoint = config.endpoints.at(m.spec.endpoint_ref);
            if (is_simulated_endpoint(endpoint)) {
                const auto& s = *m.simulation;
                simulated_.add_model(SimulatedModel{m.spec, s.alpha, s.beta, s.gamma, s.noise_sigma, config.seed,
                                                    s.ratio_min, s.ratio_max});
                continue;
            }
            all_simulated_ = false;
            if (gateways_.contains(endpoint.id)) continue;
            if (!transport) transport = std::make_shared<HttpTransport>();
            auto gateway = std::make_shared<Gateway>(endpoint, transport, options.sleep);
            gateways_.emplace(endpoint.id, std::make_unique<GatewayBackend>(std::move(gateway)));
        }
        for (const auto& m : config.models) endpoint_of_[m.spec.name] = m.spec.endpoint_ref;
    }

    const Tokenizer& tokenizer() const { return tokenizer_; }
    const PromptTemplate& prompt_template() const { return template_; }
    const QuestionSets& questions() const { return questions_; }

    ModelBackend& backend_for(const ModelSpec& model) {
        auto it = gateways_.find(endpoint_of_.at(model.name));
        if (it != gateways_.end()) return *it->second;
        return simulated_;
    }

    std::string now() const { return all_simulated_ ? std::string(kFrozenClock) : utc_now(); }

    RunContext context() {
        RunContext ctx;
        ctx.backend_for = [this](const ModelSpec& m) -> ModelBackend& { return backend_for(m); };
        ctx.tokenizer = tokenizer_;
        ctx.prompt_template = template_;
        const bool frozen = all_simulated_;
        ctx.clock = [frozen] { return frozen ? std::string(kFrozenClock) : utc_now(); };
        ctx.record_latency = !all_simulated_;
        return ctx;
    }

private:
    Tokenizer tokenizer_;
    PromptTemplate template_;
    QuestionSets questions_;
    SimulatedBackend simulated_;
    std::map<std::string, std::unique_ptr<GatewayBackend>> gateways_;
    std::map<std::string, std::string> endpoint_of_;
    bool all_simulated_ = true;
};

TraceStore load_trace_store(const RunConfig& config) {
    const auto path = out_file(config, kTracesFile);
    if (!std::filesystem::exists(path)) {
        throw PlanError("no Stage-1 traces at " + path.string() + "; run `generate` first");
    }
    const auto entries = load_traces(path);
    return to_trace_store(entries);
}

std::vector<ExperimentRecord> load_run_records(const RunConfig& config) {
    const auto path = out_file(config, kRecordsFile);
    if (!std::filesystem::exists(path)) {
        throw PlanError("no records at " + path.string() + "; run `evaluate` first");
    }
    return load_records(path);
}

std::map<std::string, double> model_sizes(const RunConfig& config) {
    std::map<std::string, double> sizes;
    for (const auto& m : config.models) sizes[m.spec.name] = m.spec.size_billions;
    return sizes;
}

double frontier_tokens(const AccuracySummary& s) {
    return s.budget.is_unlimited() ? s.mean_thinking_tokens : static_cast<double>(*s.budget.limit());
}

std::string fixed(double value, int decimals) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.*f", decimals, value);
    return buffer;
}

std::string general(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

ojson fit_to_json(const ScalingFit& fit) {
    ojson j;
    j["alpha"] = fit.alpha;
    j["beta"] = fit.beta;
    j["gamma"] = fit.gamma;
    j["sigma"] = fit.sigma;
    j["n_points"] = fit.n_points;
    j["std_error"] = {{"alpha", fit.std_error[0]}, {"beta", fit.std_error[1]}, {"gamma", fit.std_error[2]}};
    return j;
}

using GroupKey = std::pair<std::string, std::string>;

std::map<GroupKey, std::vector<const AccuracySummary*>> by_model_and_dataset(const std::vector<AccuracySummary>& rows) {
    std::map<GroupKey, std::vector<const AccuracySummary*>> groups;
    for (const auto& s : rows) groups[{s.model, s.dataset_id}].push_back(&s);
    return groups;
}

std::string format_size(double size) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%g", size);
    return buffer;
}

} // namespace

std::size_t run_generate(const RunConfig& config, const PipelineOptions& options) {
    Resources res(config, options);
    const auto traces_path = out_file(config, kTracesFile);
    guard_outputs({traces_path, manifest_path(config, "generate")}, options.force);

    struct Item {
        const ModelConfig* model;
        const QuestionRecord* question;
    };
    std::vector<const ModelConfig*> models;
    for (const auto& m : config.models) models.push_back(&m);
    std::sort(models.begin(), models.end(), [](auto* a, auto* b) { return a->spec.name < b->spec.name; });
    std::vector<Item> items;
    for (const auto* m : models) {
        for (const auto& [dataset, list] : res.questions()) {
            std::vector<const QuestionRecord*> sorted;
            for (const auto& q : list) sorted.push_back(&q);
            std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->id < b->id; });
            for (const auto* q : sorted) items.push_back(Item{m, q});
        }
    }

    say(options, "generate: " + std::to_string(items.size()) + " unconstrained traces");
    std::vector<TraceStoreEntry> entries(items.size());
    parallel_for(items.size(), config.parallelism, [&](std::size_t i) {
        const auto& item = items[i];
        const ReasoningTrace trace = generate_unconstrained(item.model->spec, *item.question,
                                                            res.backend_for(item.model->spec), res.tokenizer(),
                                                            res.prompt_template());
        entries[i] = make_trace_entry(item.model->spec.name, item.question->id, trace, res.now());
    });

    std::filesystem::create_directories(config.output_dir);
    append_traces(traces_path, entries);
    const auto empty = std::count_if(entries.begin(), entries.end(), [](const auto& e) { return e.empty_thinking; });
    if (empty > 0) say(options, "generate: " + std::to_string(empty) + " trace(s) carry no thinking");

    Manifest manifest = start_manifest(config, "generate");
    manifest.add_output(config.output_dir, traces_path);
    write_manifest(config.output_dir, manifest);
    return entries.size();
}

std::size_t run_truncate(const RunConfig& config, const PipelineOptions& options,
                         const std::optional<std::string>& question_id, const std::optional<BudgetSpec>& budget) {
    Resources res(config, options);
    const TraceStore traces = load_trace_store(config);
    const auto prompts_path = out_file(config, kPromptsFile);
    guard_outputs({prompts_path, manifest_path(config, "truncate")}, options.force);

    std::vector<BudgetSpec> budgets = budget ? std::vector<BudgetSpec>{*budget} : config.budgets;
    std::sort(budgets.begin(), budgets.end());
    std::vector<const ModelConfig*> models;
    for (const auto& m : config.models) models.push_back(&m);
    std::sort(models.begin(), models.end(), [](auto* a, auto* b) { return a->spec.name < b->spec.name; });

    bool question_found = !question_id.has_value();
    JsonlWriter writer(prompts_path, JsonlWriter::Mode::Truncate);
    std::size_t written = 0;
    for (const auto* m : models) {
        for (const auto& [dataset, list] : res.questions()) {
            std::vector<const QuestionRecord*> sorted;
            for (const auto& q : list) {
                if (!question_id || q.id == *question_id) sorted.push_back(&q);
            }
            std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->id < b->id; });
            for (const auto* q : sorted) {
                question_found = true;
                auto it = traces.find({m->spec.name, q->id});
                if (it == traces.end()) {
                    throw PlanError("no Stage-1 trace for (" + m->spec.name + ", " + q->id + ")");
                }
                const std::string thinking = extract_think(it->second.raw).thinking;
                for (const auto& b : budgets) {
                    const BudgetSpec effective = effective_budget(b, m->spec);
                    const std::string cut = truncate_thinking(thinking, effective, res.tokenizer());
                    ojson row;
                    row["model"] = m->spec.name;
                    row["dataset_id"] = dataset;
                    row["question_id"] = q->id;
                    row["budget"] = b.to_string();
                    row["effective_budget"] = effective.to_string();
                    row["thinking_tokens"] = res.tokenizer().count(cut);
                    row["prompt"] = reconstruct_prompt(*q, cut, res.prompt_template());
                    writer.write_line(row.dump());
                    ++written;
                }
            }
        }
    }
    if (!question_found) throw ConfigError("unknown question id '" + *question_id + "'");

    Manifest manifest = start_manifest(config, "truncate");
    manifest.add_output(config.output_dir, prompts_path);
    write_manifest(config.output_dir, manifest);
    say(options, "truncate: " + std::to_string(written) + " prompts");
    return written;
}

EvaluateOutcome run_evaluate(const RunConfig& config, const PipelineOptions& options) {
    Resources res(config, options);
    const RunPlan plan = config.plan();
    plan.validate();
    const bool needs_traces = plan.mode == RunMode::Truncation || plan.native_reconstructs_prompt;
    const TraceStore traces = needs_traces ? load_trace_store(config) : TraceStore{};
    const auto records_path = out_file(config, kRecordsFile);
    const auto summary_path = out_file(config, kSummaryFile);
    guard_outputs({records_path, summary_path, manifest_path(config, "evaluate")}, options.force);

    say(options, "evaluate: " + std::to_string(plan.models.size()) + " model(s) x " +
                     std::to_string(plan.budgets.size()) + " budget(s)");
    const auto records = run_matrix(plan, res.questions(), traces, res.context());

    std::filesystem::create_directories(config.output_dir);
    append_records(records_path, records);
    export_summary_csv(aggregate(records), summary_path);

    Manifest manifest = start_manifest(config, "evaluate");
    manifest.add_output(config.output_dir, records_path);
    manifest.add_output(config.output_dir, summary_path);
    write_manifest(config.output_dir, manifest);

    EvaluateOutcome outcome;
    outcome.records = records.size();
    outcome.failures = static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(), [](const auto& r) { return r.error.has_value(); }));
    if (outcome.failures > 0) say(options, "evaluate: " + std::to_string(outcome.failures) + " call(s) failed");
    return outcome;
}

std::vector<DatasetFit> run_analyze(const RunConfig& config, const PipelineOptions& options,
                                    const AnalyzeOptions& analyze) {
    const auto records = load_run_records(config);
    const auto summaries = aggregate(records);
    const auto fit_path = out_file(config, kFitFile);
    const auto frontier_path = out_file(config, kFrontierFile);
    guard_outputs({fit_path, frontier_path, manifest_path(config, "analyze")}, options.force);
    const auto sizes = model_sizes(config);

    std::map<std::string, std::vector<AccuracySummary>> per_dataset;
    for (const auto& s : summaries) per_dataset[s.dataset_id].push_back(s);
    if (per_dataset.empty()) throw DegenerateFitError("no records to analyze", "intercept");

    ojson doc;
    doc["run_id"] = config.run_id;
    doc["weighting"] = analyze.weighting == FitWeighting::TrialCount ? "trial_count" : "uniform";
    std::vector<DatasetFit> fits;
    ojson datasets = ojson::array();
    for (const auto& [dataset, rows] : per_dataset) {
        const auto observations = scaling_observations(rows, sizes, analyze.weighting);
        const ScalingFit fit = fit_scaling_law(std::span<const ScalingObservation>(observations));
        fits.push_back(DatasetFit{dataset, fit});

        ojson entry;
        entry["dataset"] = dataset;
        entry["fit"] = fit_to_json(fit);
        if (fit.alpha > 0.0) {
            ojson saturation = ojson::object();
            for (double eps : analyze.saturation_epsilons) saturation[format_size(eps)] = saturation_budget(fit.alpha, eps);
            entry["saturation_budget"] = std::move(saturation);
            entry["regime_onset"] = {{"Balanced", regime_onset(fit.alpha, Regime::Balanced)},
                                     {"HighAccuracy", regime_onset(fit.alpha, Regime::HighAccuracy)}};
        }
        datasets.push_back(std::move(entry));
    }
    doc["datasets"] = std::move(datasets);

    std::string frontier_csv = "model,dataset,budget,tokens,accuracy,delta_vs_none,on_frontier,budget_regime\n";
    ojson groups = ojson::array();
    for (const auto& [key, rows] : by_model_and_dataset(summaries)) {
        std::vector<BudgetAccuracy> points;
        const AccuracySummary* baseline = nullptr;
        for (const auto* s : rows) {
            points.push_back(BudgetAccuracy{frontier_tokens(*s), s->accuracy});
            if (s->budget.is_none()) baseline = s;
        }
        const auto frontier = pareto_frontier(points);
        ojson group;
        group["model"] = key.first;
        group["dataset"] = key.second;
        ojson frontier_json = ojson::array();
        for (const auto& p : frontier) frontier_json.push_back({{"tokens", p.tokens}, {"accuracy", p.accuracy}});
        group["frontier"] = std::move(frontier_json);

        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto& s = *rows[i];
            const bool on = std::find(frontier.begin(), frontier.end(), points[i]) != frontier.end();
            frontier_csv += csv_field(s.model) + "," + csv_field(s.dataset_id) + "," + s.budget.to_string() + "," +
                            fixed(points[i].tokens, 2) + "," + fixed(s.accuracy, 4) + "," +
                            (baseline ? fixed(delta_performance(s, *baseline), 4) : std::string()) + "," +
                            (on ? "1" : "0") + "," + std::string(to_string(regime_for_budget(s.budget))) + "\n";
        }

        if (analyze.cost) {
            try {
                const auto best = optimal_budget(points, *analyze.cost);
                group["optimal"] = {{"tokens", best.tokens}, {"accuracy", best.accuracy},
                                    {"cost", analyze.cost->cost(best.tokens)}};
            } catch (const InfeasibleError& e) {
                group["optimal"] = {{"infeasible", true}, {"cheapest_cost", e.cheapest_cost()}};
            }
        }

        double ratio_sum = 0.0, ratio_min = 0.0, ratio_max = 0.0;
        std::size_t ratio_n = 0;
        for (const auto& r : records) {
            if (r.model != key.first || r.dataset_id != key.second || !r.budget.is_unlimited() || r.input_tokens == 0) {
                continue;
            }
            const double ratio = static_cast<double>(r.thinking_tokens) / static_cast<double>(r.input_tokens);
            ratio_min = ratio_n == 0 ? ratio : std::min(ratio_min, ratio);
            ratio_max = ratio_n == 0 ? ratio : std::max(ratio_max, ratio);
            ratio_sum += ratio;
            ++ratio_n;
        }
        if (ratio_n > 0) {
            group["thinking_ratio"] = {{"min", ratio_min}, {"mean", ratio_sum / static_cast<double>(ratio_n)},
                                       {"max", ratio_max}};
        }
        groups.push_back(std::move(group));
    }
    doc["models"] = std::move(groups);

    if (analyze.loss_law) {
        std::vector<LossLawPoint> points;
        for (const auto& s : summaries) {
            const double loss = 1.0 - s.accuracy;
            if (loss > 0.0) points.push_back(LossLawPoint{sizes.at(s.model), frontier_tokens(s), loss});
        }
        try {
            const auto law = fit_loss_law(points);
            ojson j{{"n_c", law.n_c},         {"alpha_n", law.alpha_n}, {"t_c", law.t_c}, {"alpha_t", law.alpha_t},
                    {"t0", law.t0},           {"log_scale", law.log_scale}, {"log_rss", law.log_rss}};
            if (law.warning) j["warning"] = *law.warning;
            doc["loss_law"] = std::move(j);
        } catch (const DomainError& e) {
            doc["loss_law"] = {{"error", e.what()}};
        }
    }

    std::filesystem::create_directories(config.output_dir);
    write_text_file(fit_path, doc.dump(2) + "\n");
    write_text_file(frontier_path, frontier_csv);
    Manifest manifest = start_manifest(config, "analyze");
    manifest.add_output(config.output_dir, fit_path);
    manifest.add_output(config.output_dir, frontier_path);
    write_manifest(config.output_dir, manifest);
    for (const auto& f : fits) {
        say(options, "analyze: " + f.dataset_id + " alpha=" + fixed(f.fit.alpha, 4) + " beta=" + fixed(f.fit.beta, 4) +
                         " gamma=" + fixed(f.fit.gamma, 4) + " sigma=" + fixed(f.fit.sigma, 4));
    }
    return fits;
}

std::string run_report(const RunConfig& config, const PipelineOptions& options) {
    const auto records = load_run_records(config);
    const auto summaries = aggregate(records);
    const auto curves_path = out_file(config, kCurvesFile);
    const auto report_path = out_file(config, "report.txt");
    guard_outputs({curves_path, report_path, manifest_path(config, "report")}, options.force);

    // Fitted parameters from a previous `analyze`, when present.
    std::map<std::string, ScalingFit> fits;
    if (const auto fit_path = out_file(config, kFitFile); std::filesystem::exists(fit_path)) {
        const auto doc = ojson::parse(read_text_file(fit_path));
        for (const auto& entry : doc.at("datasets")) {
            ScalingFit f;
            const auto& j = entry.at("fit");
            f.alpha = j.at("alpha").get<double>();
            f.beta = j.at("beta").get<double>();
            f.gamma = j.at("gamma").get<double>();
            f.sigma = j.at("sigma").get<double>();
            fits.emplace(entry.at("dataset").get<std::string>(), f);
        }
    }
    const auto sizes = model_sizes(config);

    std::string csv = "model,dataset,budget,tokens,accuracy,n,predicted,marginal_utility,efficiency_regime,budget_regime\n";
    for (const auto& s : summaries) {
        const double tokens = frontier_tokens(s);
        std::string predicted, utility, regime;
        if (auto it = fits.find(s.dataset_id); it != fits.end() && sizes.contains(s.model)) {
            predicted = fixed(predict_accuracy(it->second, tokens, sizes.at(s.model)).value, 6);
            const double mu = marginal_utility(it->second.alpha, tokens);
            utility = general(mu);
            if (mu >= 0.0) regime = std::string(to_string(classify_efficiency(mu)));
        }
        csv += csv_field(s.model) + "," + csv_field(s.dataset_id) + "," + s.budget.to_string() + "," + fixed(tokens, 2) +
               "," + fixed(s.accuracy, 4) + "," + std::to_string(s.n) + "," + predicted + "," + utility + "," + regime +
               "," + std::string(to_string(regime_for_budget(s.budget))) + "\n";
    }

    // Terminal table: one row per (model, dataset), one column per budget.
    std::vector<BudgetSpec> budgets;
    for (const auto& s : summaries) budgets.push_back(s.budget);
    std::sort(budgets.begin(), budgets.end());
    budgets.erase(std::unique(budgets.begin(), budgets.end()), budgets.end());
    std::ostringstream table;
    char cell[64];
    std::snprintf(cell, sizeof cell, "%-24s %-16s", "model", "dataset");
    table << cell;
    for (const auto& b : budgets) {
        std::snprintf(cell, sizeof cell, " %7s", b.to_string().c_str());
        table << cell;
    }
    table << '\n';
    for (const auto& [key, rows] : by_model_and_dataset(summaries)) {
        std::snprintf(cell, sizeof cell, "%-24s %-16s", key.first.c_str(), key.second.c_str());
        table << cell;
        for (const auto& b : budgets) {
            auto it = std::find_if(rows.begin(), rows.end(), [&](auto* s) { return s->budget == b; });
            if (it == rows.end()) std::snprintf(cell, sizeof cell, " %7s", "-");
            else std::snprintf(cell, sizeof cell, " %6.1f%%", 100.0 * (*it)->accuracy);
            table << cell;
        }
        table << '\n';
    }

    write_text_file(curves_path, csv);
    write_text_file(report_path, table.str());
    Manifest manifest = start_manifest(config, "report");
    manifest.add_output(config.output_dir, curves_path);
    manifest.add_output(config.output_dir, report_path);
    write_manifest(config.output_dir, manifest);
    return table.str();
}

SimulateOutcome run_simulate(const SimulateOptions& simulate, const PipelineOptions& options) {
    if (simulate.questions == 0) throw ConfigError("simulate: --questions must be >= 1");
    if (simulate.sizes.empty()) throw ConfigError("simulate: at least one model size is required");
    const auto dir = simulate.output_dir;
    const auto config_path = dir / "config.json";
    const auto questions_path = dir / "questions.jsonl";
    guard_outputs({config_path, questions_path}, options.force);
    std::filesystem::create_directories(dir);

    write_questions(questions_path, synthetic_questions("synthetic", simulate.questions, simulate.seed));

    ojson cfg;
    cfg["run_id"] = "sim-" + std::to_string(simulate.seed);
    cfg["endpoints"] = {{"sim", {{"base_url", "sim://local"}}}};
    ojson models = ojson::array();
    for (double size : simulate.sizes) {
        models.push_back({{"name", "sim-" + format_size(size) + "b"},
                          {"family", "simulated"},
                          {"size_billions", size},
                          {"native_budget_support", simulate.mode == RunMode::Native},
                          {"endpoint", "sim"},
                          {"simulation",
                           {{"alpha", simulate.alpha},
                            {"beta", simulate.beta},
                            {"gamma", simulate.gamma},
                            {"noise_sigma", simulate.noise_sigma}}}});
    }
    cfg["models"] = std::move(models);
    cfg["datasets"] = ojson::array({{{"id", "synthetic"}, {"path", "questions.jsonl"}}});
    ojson budgets = ojson::array();
    for (const auto& b : simulate.budgets) budgets.push_back(b.to_string());
    cfg["budgets"] = std::move(budgets);
    cfg["mode"] = std::string(to_string(simulate.mode));
    cfg["parallelism"] = simulate.parallelism;
    cfg["seed"] = simulate.seed;
    cfg["output_dir"] = ".";
    write_text_file(config_path, cfg.dump(2) + "\n");

    const RunConfig config = load_config(config_path);
    SimulateOutcome outcome;
    outcome.config_path = config_path;
    if (config.mode == RunMode::Truncation) run_generate(config, options);
    outcome.evaluation = run_evaluate(config, options);
    outcome.fits = run_analyze(config, options);
    return outcome;
}

} // namespace thinkbudget
