// SPDX-License-Identifier: Apache-2.0
// Command-line entry point: generate, truncate, evaluate, analyze, report, simulate.
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "thinkbudget/errors.hpp"
#include "thinkbudget/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUnexpected = 1;
constexpr int kExitConfig = 2;
constexpr int kExitGateway = 3;
constexpr int kExitDegenerate = 4;

} // namespace

int main(int argc, char** argv) {
    using namespace thinkbudget;

    CLI::App app{"thinkbudget: thinking-budget evaluation harness and scaling analysis"};
    app.set_version_flag("--version", std::string(THINKBUDGET_VERSION));
    app.require_subcommand(1);
    bool quiet = false;
    bool force = false;
    app.add_flag("-q,--quiet", quiet, "Suppress progress messages");

    std::string config_path;
    auto with_config = [&](CLI::App* sub) {
        sub->add_option("-c,--config", config_path, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_flag("--force", force, "Overwrite existing outputs");
    };

    auto* generate = app.add_subcommand("generate", "Stage 1: unconstrained reasoning traces");
    with_config(generate);

    auto* truncate = app.add_subcommand("truncate", "Stage 2: write budget-constrained prompts for inspection");
    with_config(truncate);
    std::optional<std::string> question;
    std::optional<std::string> budget_text;
    truncate->add_option("--question", question, "Only this question id");
    truncate->add_option("--budget", budget_text, "Only this budget (none, 64, ..., inf)");

    auto* evaluate = app.add_subcommand("evaluate", "Stage 3: run the model x dataset x budget matrix");
    with_config(evaluate);

    auto* analyze = app.add_subcommand("analyze", "Fit the scaling law, frontiers and optimal budgets");
    with_config(analyze);
    bool uniform = false;
    bool loss_law = false;
    std::vector<double> epsilons;
    std::optional<double> c0, c1, c_max;
    analyze->add_flag("--uniform", uniform, "Weight every condition equally instead of by trial count");
    analyze->add_option("--epsilon", epsilons, "Marginal-utility thresholds for saturation budgets");
    analyze->add_option("--c0", c0, "Fixed cost per query");
    analyze->add_option("--c1", c1, "Cost per thinking token");
    analyze->add_option("--c-max", c_max, "Cost cap");
    analyze->add_flag("--loss-law", loss_law, "Also fit the joint loss law to 1 - accuracy");

    auto* report = app.add_subcommand("report", "Export plot-ready curves and print the accuracy table");
    with_config(report);

    auto* simulate = app.add_subcommand("simulate", "Synthetic end-to-end run on simulated models");
    SimulateOptions sim;
    std::string sim_mode = "truncation";
    std::vector<std::string> sim_budgets;
    simulate->add_option("-o,--output-dir", sim.output_dir, "Output directory")->capture_default_str();
    simulate->add_option("--questions", sim.questions, "Synthetic questions")->capture_default_str();
    simulate->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
    simulate->add_option("--sizes", sim.sizes, "Model sizes in billions of parameters")->capture_default_str();
    simulate->add_option("--alpha", sim.alpha, "Accuracy per ln thinking token")->capture_default_str();
    simulate->add_option("--beta", sim.beta, "Accuracy per ln billion parameters")->capture_default_str();
    simulate->add_option("--gamma", sim.gamma, "Intercept")->capture_default_str();
    simulate->add_option("--sigma", sim.noise_sigma, "Noise standard deviation")->capture_default_str();
    simulate->add_option("--mode", sim_mode, "truncation or native")->capture_default_str();
    simulate->add_option("--parallelism", sim.parallelism, "Worker threads")->capture_default_str();
    simulate->add_option("--budgets", sim_budgets, "Budget ladder override");
    simulate->add_flag("--force", force, "Overwrite existing outputs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    PipelineOptions options;
    options.force = force;
    options.log = quiet ? nullptr : &std::cerr;

    try {
        if (*generate) {
            const auto n = run_generate(load_config(config_path), options);
            std::cout << "wrote " << n << " traces\n";
        } else if (*truncate) {
            std::optional<BudgetSpec> budget;
            if (budget_text) budget = BudgetSpec::parse(*budget_text);
            const auto n = run_truncate(load_config(config_path), options, question, budget);
            std::cout << "wrote " << n << " prompts\n";
        } else if (*evaluate) {
            const auto outcome = run_evaluate(load_config(config_path), options);
            std::cout << "wrote " << outcome.records << " records (" << outcome.failures << " failed)\n";
            if (outcome.failures > 0) return kExitGateway;
        } else if (*analyze) {
            AnalyzeOptions opts;
            opts.weighting = uniform ? FitWeighting::Uniform : FitWeighting::TrialCount;
            if (!epsilons.empty()) opts.saturation_epsilons = epsilons;
            if (c0 || c1 || c_max) {
                if (!(c0 && c1 && c_max)) throw ConfigError("--c0, --c1 and --c-max must be given together");
                opts.cost = CostModel{*c0, *c1, *c_max};
                opts.cost->validate();
            }
            opts.loss_law = loss_law;
            for (const auto& f : run_analyze(load_config(config_path), options, opts)) {
                std::cout << f.dataset_id << ": alpha=" << f.fit.alpha << " beta=" << f.fit.beta
                          << " gamma=" << f.fit.gamma << " sigma=" << f.fit.sigma << '\n';
            }
        } else if (*report) {
            std::cout << run_report(load_config(config_path), options);
        } else if (*simulate) {
            if (sim_mode == "truncation" || sim_mode == "Truncation") sim.mode = RunMode::Truncation;
            else if (sim_mode == "native" || sim_mode == "Native") sim.mode = RunMode::Native;
            else throw ConfigError("--mode must be truncation or native");
            if (!sim_budgets.empty()) {
                sim.budgets.clear();
                for (const auto& b : sim_budgets) sim.budgets.push_back(BudgetSpec::parse(b));
            }
            const auto outcome = run_simulate(sim, options);
            std::cout << "wrote " << outcome.evaluation.records << " records to " << sim.output_dir.string() << '\n';
            for (const auto& f : outcome.fits) {
                std::cout << f.dataset_id << ": alpha=" << f.fit.alpha << " beta=" << f.fit.beta
                          << " gamma=" << f.fit.gamma << " sigma=" << f.fit.sigma << '\n';
            }
            if (outcome.evaluation.failures > 0) return kExitGateway;
        }
    } catch (const DegenerateFitError& e) {
        std::cerr << "degenerate analysis: " << e.what() << " [regressor: " << e.regressor() << "]\n";
        return kExitDegenerate;
    } catch (const DomainError& e) {
        std::cerr << "degenerate analysis: " << e.what() << '\n';
        return kExitDegenerate;
    } catch (const GatewayError& e) {
        std::cerr << "gateway failure after " << e.attempts() << " attempt(s): " << e.what() << '\n';
        return kExitGateway;
    } catch (const ProtocolError& e) {
        std::cerr << "gateway failure (HTTP " << e.status() << "): " << e.what() << '\n';
        return kExitGateway;
    } catch (const ConfigError& e) {
        for (const auto& v : e.violations()) std::cerr << "config error: " << v << '\n';
        return kExitConfig;
    } catch (const Error& e) {
        // Validation, template, plan and store errors all stem from bad inputs.
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << '\n';
        return kExitUnexpected;
    }
    return kExitOk;
}
