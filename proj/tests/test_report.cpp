#include <cmath>

#include <doctest.h>

#include "prtail/report.hpp"
#include "prtail/synthesis.hpp"
#include "support/fixtures.hpp"

using namespace prtail;

namespace {

const Graph& sample_graph() {
    static const Graph g = [] {
        SynthSpec s;
        s.n = 5000;
        s.alpha = 1.5;
        s.outdeg_hist = {0.1, 0.3, 0.3, 0.2, 0.1};
        s.d = testing::hist_mean(s.outdeg_hist);
        s.seed = 12;
        return generate(s).graph;
    }();
    return g;
}

}  // namespace

TEST_CASE("full analysis") {
    AnalysisOptions opts;
    opts.dampings = {0.5, 0.85};
    opts.snapshot_iters = {1, 2};
    const auto report = analyze_graph(sample_graph(), opts);
    REQUIRE(report.indegree_fit);
    REQUIRE(report.theory_alpha);
    CHECK(*report.theory_alpha == report.indegree_fit->alpha_hat);
    REQUIRE(report.dampings.size() == 2);
    for (const auto& entry : report.dampings) {
        CHECK(entry.converged);
        REQUIRE(entry.coefficients);
        CHECK(entry.coefficients->C_k.size() == 2);
        REQUIRE(entry.configurations.size() == 3);
        CHECK(entry.configurations[0].iteration == 1);
        CHECK(entry.configurations[1].iteration == 2);
        CHECK_FALSE(entry.configurations[2].iteration);
        for (const auto& config : entry.configurations) {
            REQUIRE(config.predicted);
            CHECK(config.predicted->slope == -report.indegree_fit->alpha_hat);
            REQUIRE(config.observed_intercept);
            CHECK(*config.residual == doctest::Approx(*config.observed_intercept - config.predicted->intercept));
        }
        CHECK(*entry.configurations[2].coefficient == entry.coefficients->C_limit);
        CHECK(*entry.configurations[0].coefficient == entry.coefficients->C_k[0]);
    }

    const auto j = to_json(report);
    CHECK(j.at("schema_version") == kReportSchemaVersion);
    for (const char* key : {"degree_profile", "indegree_fit", "theory_alpha", "pagerank", "warnings"})
        CHECK(j.contains(key));
    const auto& config = j.at("pagerank")[0].at("configurations")[2];
    CHECK(config.at("iteration") == "final");
    for (const char* key : {"fit", "coefficient", "log10_coefficient", "predicted_line", "observed_intercept", "residual"})
        CHECK(config.contains(key));
}

TEST_CASE("alpha override feeds the coefficients") {
    AnalysisOptions opts;
    opts.dampings = {0.85};
    opts.alpha = 1.3;
    const auto report = analyze_graph(sample_graph(), opts);
    CHECK(*report.theory_alpha == 1.3);
    const auto expect = coefficient_C(TheoryParams::from_profile(0.85, 1.3, report.profile));
    CHECK(report.dampings[0].coefficients->C_limit == doctest::Approx(expect));
}

TEST_CASE("no dampings: statistics and in-degree fit only") {
    const auto report = analyze_graph(sample_graph(), AnalysisOptions{});
    CHECK(report.dampings.empty());
    CHECK(report.indegree_fit);
    CHECK(to_json(report).at("pagerank").empty());
}

TEST_CASE("tail too small to fit gives a partial report") {
    const Graph star = testing::graph_from(5, {{1, 0}, {2, 0}, {3, 0}, {4, 0}});
    AnalysisOptions opts;
    opts.dampings = {0.85};
    const auto report = analyze_graph(star, opts);
    CHECK_FALSE(report.indegree_fit);
    CHECK_FALSE(report.warnings.empty());
    REQUIRE(report.dampings.size() == 1);
    CHECK_FALSE(report.dampings[0].coefficients);
    const auto j = to_json(report);
    CHECK(j.at("indegree_fit").is_null());
    CHECK(j.at("pagerank")[0].at("configurations")[0].at("residual").is_null());
}

TEST_CASE("prediction table with the published Indochina fit") {
    const TailFit indeg{1.17, 1.0, 0.80, 1000};
    const double expected[] = {-1.73, -1.16, -0.70};
    int i = 0;
    for (double c : {0.2, 0.5, 0.85}) {
        const auto j = prediction_json(TheoryParams::from_values(c, 1.17, 26.17, 0.18, 0.65), 2, indeg);
        const auto& lines = j.at("predicted_lines");
        REQUIRE(lines.size() == 3);
        CHECK(lines[2].at("iteration") == "limit");
        CHECK(lines[2].at("slope").get<double>() == -1.17);
        CHECK(std::abs(lines[2].at("intercept").get<double>() - expected[i++]) <= 0.01);
    }
    const auto bare = prediction_json(TheoryParams::from_values(0.85, 1.17, 26.17, 0.18, 0.65), 1, std::nullopt);
    CHECK_FALSE(bare.contains("predicted_lines"));
}

TEST_CASE("simulation with zero damping is degenerate") {
    ModelSpec spec;
    spec.c = 0.0;
    spec.alpha = 2.0;
    spec.outdeg_hist = {0.2, 0.8};
    spec.d = 0.8;
    spec.pool_size = 10'000;
    const auto report = run_simulation(spec, {{1}, {std::nullopt}}, SimulationOptions{});
    CHECK(report.degenerate);
    REQUIRE(report.outcomes.size() == 2);
    for (const auto& o : report.outcomes) {
        for (double x : o.pool.values) CHECK(x == 1.0);
        CHECK(o.summary.at("tail_ratios").empty());
        CHECK(o.summary.at("checks").at("lower_bound") == true);
    }
    CHECK(report.to_json(spec).at("degenerate") == true);
}

TEST_CASE("simulation summary") {
    ModelSpec spec;
    spec.c = 0.85;
    spec.alpha = 2.5;
    spec.outdeg_hist = {0.1, 0.45, 0.0, 0.45};
    spec.d = testing::hist_mean(spec.outdeg_hist);
    spec.pool_size = 100'000;
    const auto report = run_simulation(spec, {{2}, {1}, {2}}, SimulationOptions{});
    REQUIRE(report.outcomes.size() == 3);
    CHECK(report.outcomes[0].summary.at("generation") == 2);
    CHECK(report.outcomes[1].summary.at("generation") == 1);
    CHECK(report.outcomes[0].pool.values == report.outcomes[2].pool.values);
    const auto& s = report.outcomes[1].summary;
    CHECK(s.at("tail_ratios").size() == 9);
    CHECK(s.at("checks").at("mean_within_5_over_sqrt_M") == true);
    CHECK(s.at("checks").at("lower_bound") == true);
    CHECK(s.at("coefficient").get<double>() ==
          doctest::Approx(coefficient_Ck(TheoryParams::from_values(0.85, 2.5, spec.d, 0.1, b_coefficient(spec.outdeg_hist, 2.5)), 1)));
}
