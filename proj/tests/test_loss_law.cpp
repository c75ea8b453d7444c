// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "test_support.hpp"
#include "thinkbudget/errors.hpp"
#include "thinkbudget/scaling.hpp"

using namespace thinkbudget;

namespace {

std::vector<LossLawPoint> synthetic(double n_c, double alpha_n, double t_c, double alpha_t, double t0) {
    std::vector<LossLawPoint> out;
    for (double n : {1.7, 4.0, 8.0, 14.0, 32.0, 70.0}) {
        for (double t : {0.0, 64.0, 128.0, 256.0, 512.0, 1024.0, 2048.0}) {
            out.push_back({n, t, std::pow(n_c / n, alpha_n) * std::pow(t_c / (t + t0), alpha_t)});
        }
    }
    return out;
}

std::vector<LossLawPoint> noisy_points() {
    std::istringstream in(testing::slurp(testing::data_path("loss_law_noisy.csv")));
    std::string line;
    std::getline(in, line);
    std::vector<LossLawPoint> out;
    while (std::getline(in, line)) {
        double n = 0, t = 0, l = 0;
        REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf", &n, &t, &l) == 3);
        out.push_back({n, t, l});
    }
    return out;
}

} // namespace

TEST_CASE("noiseless data recovers exponents and offset") {
    const auto points = synthetic(300.0, 0.25, 2000.0, 0.35, 40.0);
    const auto fit = fit_loss_law(points);
    CHECK(fit.alpha_n == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(fit.alpha_t == doctest::Approx(0.35).epsilon(1e-6));
    CHECK(fit.t0 == doctest::Approx(40.0).epsilon(1e-5));
    CHECK(fit.log_scale == doctest::Approx(0.25 * std::log(300.0) + 0.35 * std::log(2000.0)).epsilon(1e-6));
    CHECK(fit.t_c == 1.0);
    CHECK(fit.log_rss < 1e-12);
    CHECK_FALSE(fit.warning.has_value());
    for (const auto& p : points) CHECK(fit.predict(p.n_params, p.thinking_tokens) == doctest::Approx(p.loss).epsilon(1e-5));
}

TEST_CASE("noisy fit lands on the reference minimiser and inside the bootstrap bands") {
    const auto expected = testing::load_json("loss_law_expected.json");
    const auto& ref = expected["minimiser"];
    const auto fit = fit_loss_law(noisy_points());
    CHECK(fit.t0 == doctest::Approx(ref["t0"].get<double>()).epsilon(1e-4));
    CHECK(fit.alpha_n == doctest::Approx(ref["alpha_n"].get<double>()).epsilon(1e-5));
    CHECK(fit.alpha_t == doctest::Approx(ref["alpha_t"].get<double>()).epsilon(1e-5));
    CHECK(fit.log_scale == doctest::Approx(ref["log_scale"].get<double>()).epsilon(1e-5));
    CHECK(fit.log_rss <= ref["log_rss"].get<double>() * (1.0 + 1e-9));

    const auto& band = expected["band95"];
    CHECK(fit.alpha_n >= band["alpha_n"][0].get<double>());
    CHECK(fit.alpha_n <= band["alpha_n"][1].get<double>());
    CHECK(fit.alpha_t >= band["alpha_t"][0].get<double>());
    CHECK(fit.alpha_t <= band["alpha_t"][1].get<double>());
    CHECK(std::log(fit.t0) >= band["log_t0"][0].get<double>());
    CHECK(std::log(fit.t0) <= band["log_t0"][1].get<double>());
}

TEST_CASE("skipping the refinement leaves the best grid node") {
    LossLawOptions coarse;
    coarse.refine = false;
    const auto points = noisy_points();
    const auto grid_only = fit_loss_law(points, coarse);
    const auto refined = fit_loss_law(points);
    CHECK(refined.log_rss <= grid_only.log_rss);
    const double step = (std::log(coarse.t0_max) - std::log(coarse.t0_min)) / (coarse.grid_points - 1);
    const double node = std::round((std::log(grid_only.t0) - std::log(coarse.t0_min)) / step);
    CHECK(std::log(grid_only.t0) == doctest::Approx(std::log(coarse.t0_min) + node * step).epsilon(1e-12));
}

TEST_CASE("predicted loss falls as the thinking budget grows") {
    const auto fit = fit_loss_law(noisy_points());
    for (double n : {1.7, 8.0, 70.0}) {
        double previous = fit.predict(n, 0.0);
        for (double t = 1.0; t <= 4096.0; t *= 1.5) {
            const double now = fit.predict(n, t);
            REQUIRE(now < previous);
            previous = now;
        }
    }
}

TEST_CASE("insufficient or invalid data") {
    auto points = synthetic(300.0, 0.25, 2000.0, 0.35, 40.0);
    std::vector<LossLawPoint> few(points.begin(), points.begin() + 4);
    CHECK_THROWS_AS(fit_loss_law(few), DomainError);

    std::vector<LossLawPoint> one_size;
    for (const auto& p : points) {
        if (p.n_params == 8.0) one_size.push_back(p);
    }
    CHECK_THROWS_AS(fit_loss_law(one_size), DomainError);

    std::vector<LossLawPoint> one_budget;
    for (const auto& p : points) {
        if (p.thinking_tokens == 64.0) one_budget.push_back(p);
    }
    CHECK_THROWS_AS(fit_loss_law(one_budget), DomainError);

    auto zero_loss = points;
    zero_loss[3].loss = 0.0;
    CHECK_THROWS_AS(fit_loss_law(zero_loss), DomainError);

    LossLawOptions bad_grid;
    bad_grid.t0_min = 10.0;
    bad_grid.t0_max = 5.0;
    CHECK_THROWS_AS(fit_loss_law(points, bad_grid), DomainError);
}

TEST_CASE("warnings for flat and boundary optima") {
    // Loss does not depend on the budget, so every T_0 fits equally well.
    const auto flat = fit_loss_law(synthetic(300.0, 0.25, 2000.0, 0.0, 40.0));
    REQUIRE(flat.warning.has_value());
    CHECK(flat.warning->find("flat") != std::string::npos);
    CHECK(flat.alpha_t == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));

    const auto boundary = fit_loss_law(synthetic(300.0, 0.25, 2000.0, 0.35, 20000.0));
    REQUIRE(boundary.warning.has_value());
    CHECK(boundary.warning->find("boundary") != std::string::npos);
}
