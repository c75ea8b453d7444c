// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <random>

#include "test_support.hpp"
#include "thinkbudget/backend.hpp"
#include "thinkbudget/runner.hpp"
#include "thinkbudget/store.hpp"

using namespace thinkbudget;

namespace {

const LetterSet kABCD = LetterSet::parse("A,B,C,D");

// Everything a simulated matrix run needs, kept alive together.
struct SimRun {
    Tokenizer tok = Tokenizer::whitespace();
    PromptTemplate tmpl = PromptTemplate::default_template();
    SimulatedBackend backend{tok, tmpl};
    RunPlan plan;
    QuestionSets questions;
    TraceStore traces;

    SimRun(const std::vector<SimulatedModel>& models, std::vector<BudgetSpec> budgets, int n_questions) {
        plan.run_id = "eval-test";
        plan.datasets = {"ds"};
        plan.budgets = std::move(budgets);
        for (const auto& m : models) {
            backend.add_model(m);
            plan.models.push_back(m.spec);
        }
        auto& list = questions["ds"];
        for (int i = 0; i < n_questions; ++i) {
            char id[16];
            std::snprintf(id, sizeof id, "q%03d", i);
            list.push_back(testing::make_question(id, 4, std::string(1, static_cast<char>('A' + i % 4))));
        }
        for (const auto& m : models) {
            for (const auto& q : list) traces[{m.spec.name, q.id}] = generate_unconstrained(m.spec, q, backend, tok, tmpl);
        }
    }

    RunContext context() {
        RunContext ctx;
        ctx.backend_for = [this](const ModelSpec&) -> ModelBackend& { return backend; };
        ctx.tokenizer = tok;
        ctx.prompt_template = tmpl;
        ctx.clock = [] { return std::string("1970-01-01T00:00:00Z"); };
        ctx.record_latency = false;
        return ctx;
    }

    std::vector<ExperimentRecord> run() { return run_matrix(plan, questions, traces, context()); }
};

SimulatedModel model(const std::string& name, double size, double alpha, double beta, double gamma,
                     double sigma = 0.0) {
    SimulatedModel m;
    m.spec = ModelSpec{name, "sim", size, false, std::nullopt, "sim"};
    m.alpha = alpha;
    m.beta = beta;
    m.gamma = gamma;
    m.noise_sigma = sigma;
    m.seed = 2024;
    return m;
}

} // namespace

TEST_CASE("answer extraction") {
    CHECK(extract_answer("The answer is B.", kABCD) == LetterSet{'B'});
    CHECK(extract_answer("Answer: C", kABCD) == LetterSet{'C'});
    CHECK(extract_answer("answer: b", kABCD).empty());
    CHECK(extract_answer("First I thought the answer is A. Final answer: D", kABCD) == LetterSet{'D'});
    CHECK(extract_answer("Answer: B, C", kABCD) == LetterSet::parse("B,C"));
    CHECK(extract_answer("the answer is B and D", kABCD) == LetterSet::parse("B,D"));
    CHECK(extract_answer("Reasoning done.\nB,C\n", kABCD) == LetterSet::parse("B,C"));
    CHECK(extract_answer("Answer: E", kABCD).empty());
    CHECK(extract_answer("Based on everything, no idea", kABCD).empty());
    CHECK(extract_answer("", kABCD).empty());
    CHECK(extract_answer("Answer: **(A)**", kABCD) == LetterSet{'A'});
}

TEST_CASE("scoring is exact set match") {
    CHECK(score(LetterSet{'B'}, LetterSet{'B'}));
    CHECK_FALSE(score(LetterSet::parse("B,C"), LetterSet{'B'}));
    CHECK_FALSE(score(LetterSet{'B'}, LetterSet::parse("B,C")));
    CHECK_FALSE(score(LetterSet{}, LetterSet{'A'}));
    CHECK_FALSE(score(LetterSet{}, LetterSet{}));
}

TEST_CASE("a 2 x 3 x 7 matrix yields 42 ordered records") {
    SimRun sim({model("m-small", 1.7, 0.08, 0.12, 0.0), model("m-large", 8.0, 0.08, 0.12, 0.0)},
               {BudgetSpec::none(), BudgetSpec::tokens(64), BudgetSpec::unlimited()}, 7);
    const auto records = sim.run();
    REQUIRE(records.size() == 42);
    for (std::size_t i = 1; i < records.size(); ++i) {
        const auto& a = records[i - 1];
        const auto& b = records[i];
        REQUIRE(std::tie(a.model, a.dataset_id, a.budget, a.question_id) <
                std::tie(b.model, b.dataset_id, b.budget, b.question_id));
    }
    for (const auto& r : records) {
        CHECK(r.run_id == "eval-test");
        CHECK_FALSE(r.error.has_value());
        if (r.budget.is_none()) CHECK(r.thinking_tokens == 0);
        if (r.budget == BudgetSpec::tokens(64)) CHECK(r.thinking_tokens == 64);
    }
}

TEST_CASE("certain models score exactly one and zero") {
    SimRun sim({model("always", 1.0, 0.0, 0.0, 1.0), model("never", 1.0, 0.0, 0.0, 0.0)},
               {BudgetSpec::none(), BudgetSpec::tokens(256)}, 25);
    for (const auto& s : aggregate(sim.run())) {
        CHECK(s.n == 25);
        CHECK(s.accuracy == (s.model == "always" ? 1.0 : 0.0));
    }
}

TEST_CASE("serial and parallel runs produce identical records") {
    SimRun sim({model("a", 4.0, 0.08, 0.12, 0.0, 0.03), model("b", 8.0, 0.08, 0.12, 0.0, 0.03)}, budget_ladder(), 30);
    const auto serial = sim.run();
    sim.plan.parallelism = 4;
    const auto parallel = sim.run();
    CHECK(serial == parallel);
    CHECK(encode_record(serial.front()) == encode_record(parallel.front()));
}

TEST_CASE("record order ignores the order of inputs") {
    SimRun sim({model("a", 4.0, 0.08, 0.12, 0.0), model("b", 8.0, 0.08, 0.12, 0.0)}, budget_ladder(), 12);
    const auto baseline = sim.run();
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 5; ++trial) {
        std::shuffle(sim.plan.models.begin(), sim.plan.models.end(), rng);
        std::shuffle(sim.plan.budgets.begin(), sim.plan.budgets.end(), rng);
        std::shuffle(sim.questions["ds"].begin(), sim.questions["ds"].end(), rng);
        REQUIRE(sim.run() == baseline);
    }
}

TEST_CASE("noiseless accuracy never drops as the budget grows") {
    SimRun sim({model("mono", 4.0, 0.08, 0.12, -0.2)}, budget_ladder(), 200);
    const auto summaries = aggregate(sim.run());
    REQUIRE(summaries.size() == budget_ladder().size());
    for (std::size_t i = 1; i < summaries.size(); ++i) {
        CHECK(summaries[i - 1].budget < summaries[i].budget);
        CHECK(summaries[i].accuracy >= summaries[i - 1].accuracy);
    }
    CHECK(summaries.back().accuracy > summaries.front().accuracy);
}

TEST_CASE("a missing Stage-1 trace stops the run before any call") {
    SimRun sim({model("a", 4.0, 0.08, 0.12, 0.0)}, {BudgetSpec::tokens(64)}, 5);
    sim.traces.erase({"a", "q003"});
    int calls = 0;
    auto ctx = sim.context();
    ctx.backend_for = [&](const ModelSpec&) -> ModelBackend& {
        ++calls;
        return sim.backend;
    };
    CHECK_THROWS_AS(run_matrix(sim.plan, sim.questions, sim.traces, ctx), PlanError);
    CHECK(calls == 0);

    sim.plan.mode = RunMode::Native;
    CHECK_THROWS_AS(run_matrix(sim.plan, sim.questions, sim.traces, ctx), PlanError);
}

TEST_CASE("failed calls become error records") {
    class Failing final : public ModelBackend {
    public:
        ChatResponse complete(const InferenceCall&) override { throw GatewayError("down", 3); }
    } failing;
    SimRun sim({model("a", 4.0, 0.08, 0.12, 0.0)}, {BudgetSpec::tokens(64)}, 3);
    auto ctx = sim.context();
    ctx.backend_for = [&](const ModelSpec&) -> ModelBackend& { return failing; };
    const auto records = run_matrix(sim.plan, sim.questions, sim.traces, ctx);
    REQUIRE(records.size() == 3);
    for (const auto& r : records) {
        CHECK(r.error == std::optional<std::string>("down"));
        CHECK(r.extracted_answer.empty());
        CHECK_FALSE(r.correct);
    }
}

TEST_CASE("aggregate matches the independent tally") {
    const auto records = load_records(testing::data_path("records_fixture.jsonl"));
    REQUIRE(records.size() == 48);
    const auto summaries = aggregate(records);
    CHECK(summary_csv(summaries) == testing::slurp(testing::data_path("summary_golden.csv")));

    const auto golden = load_summary_csv(testing::data_path("summary_golden.csv"));
    REQUIRE(golden.size() == summaries.size());
    for (std::size_t i = 0; i < golden.size(); ++i) {
        CHECK(golden[i].model == summaries[i].model);
        CHECK(golden[i].budget == summaries[i].budget);
        CHECK(golden[i].correct == summaries[i].correct);
        CHECK(golden[i].n == summaries[i].n);
    }
}

TEST_CASE("aggregate is invariant to record order") {
    auto records = load_records(testing::data_path("records_fixture.jsonl"));
    const auto expected = aggregate(records);
    std::mt19937_64 rng(21);
    for (int i = 0; i < 20; ++i) {
        std::shuffle(records.begin(), records.end(), rng);
        REQUIRE(aggregate(records) == expected);
    }
}

TEST_CASE("delta performance against the no-thinking row") {
    const AccuracySummary none{"m", "d", BudgetSpec::none(), 0.40, 4, 10, 0.0};
    const AccuracySummary at{"m", "d", BudgetSpec::tokens(256), 0.55, 11, 20, 250.0};
    CHECK(delta_performance(at, none) == doctest::Approx(0.15));
    CHECK(delta_performance(none, none) == 0.0);
    CHECK_THROWS_AS(delta_performance(none, at), DomainError);
    AccuracySummary other = at;
    other.model = "other";
    CHECK_THROWS_AS(delta_performance(other, none), DomainError);
}

TEST_CASE("thinking ratio") {
    ReasoningTrace t;
    t.thinking_tokens = 690;
    t.input_tokens = 300;
    CHECK(thinking_ratio(t) == doctest::Approx(2.3));
    t.input_tokens = 0;
    CHECK_THROWS_AS(thinking_ratio(t), DomainError);
}

TEST_CASE("plan validation") {
    RunPlan plan;
    plan.models = {ModelSpec{"m", "f", 1.0, false, std::nullopt, "e"}};
    plan.datasets = {"d"};
    plan.budgets = {BudgetSpec::tokens(64), BudgetSpec::tokens(64)};
    CHECK_THROWS_AS(plan.validate(), PlanError);
    plan.budgets = {BudgetSpec::tokens(64)};
    CHECK_NOTHROW(plan.validate());
    plan.mode = RunMode::Native;
    CHECK_THROWS_AS(plan.validate(), PlanError);
    CHECK(parse_run_mode("native") == RunMode::Native);
    CHECK_THROWS_AS(parse_run_mode("hybrid"), ValidationError);
}
