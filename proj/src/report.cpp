#include "prtail/report.hpp"

#include <algorithm>
#include <cmath>

namespace prtail {

namespace {

nlohmann::json optional_number(const std::optional<double>& v) {
    if (!v || !std::isfinite(*v)) return nullptr;
    return *v;
}

std::vector<double> indegree_values(const Graph& g) {
    std::vector<double> values(g.num_nodes());
    for (node_t v = 0; v < g.num_nodes(); ++v) values[v] = static_cast<double>(g.in_degree(v));
    return values;
}

// Fit with the heuristic threshold unless one is supplied; problems become warnings.
std::optional<TailFit> try_fit(std::span<const double> values, std::optional<double> xmin,
                               const std::string& label, std::vector<std::string>& warnings) {
    try {
        double threshold = 0.0;
        if (xmin) {
            threshold = *xmin;
        } else {
            const auto choice = choose_xmin(values);
            if (choice.degenerate)
                warnings.push_back(label + ": no threshold with 1%-10% exceedance, using the median");
            threshold = choice.x_min;
        }
        return fit_exponent_mle(values, threshold);
    } catch (const std::exception& e) {
        warnings.push_back(label + ": tail fit unavailable (" + e.what() + ")");
        return std::nullopt;
    }
}

nlohmann::json to_json(const RankConfiguration& config) {
    nlohmann::json j;
    j["iteration"] = config.iteration ? nlohmann::json(*config.iteration) : nlohmann::json("final");
    j["fit"] = config.fit ? to_json(*config.fit) : nlohmann::json(nullptr);
    j["coefficient"] = optional_number(config.coefficient);
    j["log10_coefficient"] =
        config.coefficient ? optional_number(std::log10(*config.coefficient)) : nullptr;
    if (config.predicted)
        j["predicted_line"] = {{"slope", config.predicted->slope},
                               {"intercept", config.predicted->intercept}};
    else
        j["predicted_line"] = nullptr;
    j["observed_intercept"] = optional_number(config.observed_intercept);
    j["residual"] = optional_number(config.residual);
    return j;
}

}  // namespace

AnalysisReport analyze_graph(const Graph& g, const AnalysisOptions& options) {
    AnalysisReport report;
    report.profile = degree_profile(g);

    const auto in_values = indegree_values(g);
    try {
        report.indegree_ccdf = ccdf(in_values);
    } catch (const std::exception& e) {
        report.warnings.push_back(std::string("in-degree: ") + e.what());
    }
    report.indegree_fit = try_fit(in_values, options.xmin, "in-degree", report.warnings);
    if (options.alpha)
        report.theory_alpha = options.alpha;
    else if (report.indegree_fit)
        report.theory_alpha = report.indegree_fit->alpha_hat;

    for (double c : options.dampings) {
        PageRankParams params;
        params.c = c;
        params.tol = options.tol;
        params.max_iters = options.max_iters;
        params.snapshot_iters = options.snapshot_iters;
        params.threads = options.threads;
        const auto pr = pagerank(g, params);

        DampingAnalysis entry;
        entry.c = c;
        entry.iters_run = pr.iters_run;
        entry.converged = pr.converged;
        entry.dangling_mass = dangling_mass_fraction(pr.scores, g);
        if (!pr.converged)
            report.warnings.push_back("c=" + std::to_string(c) + ": PageRank stopped at max_iters");

        std::optional<TheoryParams> theory;
        if (report.theory_alpha) {
            try {
                theory = TheoryParams::from_profile(c, *report.theory_alpha, report.profile);
                int max_k = 1;
                for (int k : options.snapshot_iters) max_k = std::max(max_k, k);
                entry.coefficients = coefficient_table(*theory, max_k);
            } catch (const std::exception& e) {
                report.warnings.push_back("c=" + std::to_string(c) + ": coefficients unavailable (" +
                                          e.what() + ")");
                theory.reset();
            }
        }

        auto evaluate = [&](std::optional<int> iteration, std::span<const double> scores) {
            RankConfiguration config;
            config.iteration = iteration;
            const std::string label = "pagerank c=" + std::to_string(c) +
                                      (iteration ? " iter " + std::to_string(*iteration) : " final");
            config.ccdf = ccdf(scores);
            config.fit = try_fit(scores, std::nullopt, label, report.warnings);
            if (entry.coefficients) {
                config.coefficient = iteration ? entry.coefficients->C_k.at(
                                                     static_cast<std::size_t>(*iteration - 1))
                                               : entry.coefficients->C_limit;
            }
            if (config.coefficient && report.indegree_fit) {
                config.predicted = predict_line(*report.indegree_fit, *config.coefficient);
                if (config.fit) {
                    const double observed = pinned_intercept(config.ccdf, config.fit->x_min,
                                                             report.indegree_fit->alpha_hat);
                    if (std::isfinite(observed)) {
                        config.observed_intercept = observed;
                        config.residual = observed - config.predicted->intercept;
                    }
                }
            }
            entry.configurations.push_back(std::move(config));
        };

        for (const auto& [k, scores] : pr.snapshots)
            if (k >= 1) evaluate(k, scores);
        evaluate(std::nullopt, pr.scores);
        report.dampings.push_back(std::move(entry));
    }
    return report;
}

nlohmann::json to_json(const AnalysisReport& report) {
    nlohmann::json dampings = nlohmann::json::array();
    for (const auto& entry : report.dampings) {
        nlohmann::json configs = nlohmann::json::array();
        for (const auto& config : entry.configurations) configs.push_back(to_json(config));
        dampings.push_back(
            {{"c", entry.c},
             {"iterations_run", entry.iters_run},
             {"converged", entry.converged},
             {"dangling_mass", entry.dangling_mass},
             {"coefficients",
              entry.coefficients ? to_json(*entry.coefficients) : nlohmann::json(nullptr)},
             {"configurations", std::move(configs)}});
    }
    return {{"schema_version", kReportSchemaVersion},
            {"degree_profile", to_json(report.profile)},
            {"indegree_fit",
             report.indegree_fit ? to_json(*report.indegree_fit) : nlohmann::json(nullptr)},
            {"theory_alpha", optional_number(report.theory_alpha)},
            {"pagerank", std::move(dampings)},
            {"warnings", report.warnings}};
}

nlohmann::json prediction_json(const TheoryParams& params, int max_k,
                               const std::optional<TailFit>& indegree_fit) {
    const auto table = coefficient_table(params, max_k);
    nlohmann::json out = {{"schema_version", kReportSchemaVersion},
                          {"params",
                           {{"c", params.c},
                            {"alpha", params.alpha},
                            {"d", params.d},
                            {"p0", params.p0},
                            {"b", params.b}}},
                          {"coefficients", to_json(table)}};
    if (indegree_fit) {
        nlohmann::json lines = nlohmann::json::array();
        auto add = [&](nlohmann::json label, double C) {
            const auto line = predict_line(*indegree_fit, C);
            lines.push_back({{"iteration", std::move(label)},
                             {"slope", line.slope},
                             {"intercept", line.intercept}});
        };
        for (std::size_t i = 0; i < table.C_k.size(); ++i) add(i + 1, table.C_k[i]);
        add("limit", table.C_limit);
        out["indegree_line"] = {{"slope", -indegree_fit->alpha_hat},
                                {"intercept", indegree_fit->intercept}};
        out["predicted_lines"] = std::move(lines);
    }
    return out;
}

nlohmann::json SimulationReport::to_json(const ModelSpec& spec) const {
    nlohmann::json results = nlohmann::json::array();
    for (const auto& o : outcomes) results.push_back(o.summary);
    return {{"schema_version", kReportSchemaVersion},
            {"spec", spec.to_json()},
            {"degenerate", degenerate},
            {"results", std::move(results)}};
}

SimulationReport run_simulation(const ModelSpec& spec, const std::vector<SimulationTarget>& targets,
                                const SimulationOptions& options) {
    spec.validate();
    SimulationReport report;
    report.degenerate = spec.c == 0.0;

    std::optional<TheoryParams> theory;
    if (!report.degenerate) {
        theory = TheoryParams::from_values(spec.c, spec.alpha, spec.d, spec.p0(),
                                           b_coefficient(spec.outdeg_hist, spec.alpha));
    }
    const double lower_bound = spec.constant_term();
    const double mean_band = 5.0 / std::sqrt(static_cast<double>(spec.pool_size));

    auto summarize = [&](const SimulationTarget& target, SamplePool pool,
                         const std::vector<double>& probe_changes) {
        SimulationOutcome outcome;
        outcome.target = target;
        nlohmann::json s;
        s["generation"] = target.generations ? nlohmann::json(*target.generations)
                                             : nlohmann::json("converged");
        s["generations_run"] = pool.generation;
        const double mean = pool.mean();
        const double min = *std::min_element(pool.values.begin(), pool.values.end());
        s["pool_mean"] = mean;
        s["pool_min"] = min;
        if (!probe_changes.empty()) s["probe_changes"] = probe_changes;

        bool ratio_ok = true;
        nlohmann::json rows = nlohmann::json::array();
        if (theory) {
            const double C = target.generations ? coefficient_Ck(*theory, std::max(1, *target.generations))
                                                : coefficient_C(*theory);
            s["coefficient"] = C;
            s["log10_coefficient"] = std::log10(C);
            for (const auto& row : tail_ratio_table(pool.values, spec, C)) {
                ratio_ok = ratio_ok && row.ratio >= 0.8 && row.ratio <= 1.25;
                rows.push_back({{"x", row.x},
                                {"empirical_ccdf", row.empirical_ccdf},
                                {"theory_ccdf", row.theory_ccdf},
                                {"ratio", row.ratio}});
            }
        } else {
            s["coefficient"] = nullptr;
        }
        s["tail_ratios"] = std::move(rows);
        s["checks"] = {{"mean_within_5_over_sqrt_M", std::abs(mean - 1.0) <= mean_band},
                       {"lower_bound", min >= lower_bound - 1e-12},
                       {"tail_ratio_in_band", theory ? nlohmann::json(ratio_ok) : nullptr}};
        outcome.summary = std::move(s);
        outcome.pool = std::move(pool);
        return outcome;
    };

    std::vector<int> fixed;
    for (const auto& t : targets)
        if (t.generations) fixed.push_back(*t.generations);
    std::sort(fixed.begin(), fixed.end());
    fixed.erase(std::unique(fixed.begin(), fixed.end()), fixed.end());

    std::map<int, SimulationOutcome> by_generation;
    if (!fixed.empty()) {
        SamplePool pool = initial_pool(spec);
        for (int k : fixed) {
            while (pool.generation < k) pool = iterate_pool(pool, spec, options.threads);
            by_generation.emplace(k, summarize(SimulationTarget{k}, pool, {}));
        }
    }
    for (const auto& t : targets) {
        if (t.generations) {
            report.outcomes.push_back(by_generation.at(*t.generations));
        } else {
            auto fp = simulate_fixed_point(spec, options);
            report.outcomes.push_back(summarize(t, std::move(fp.pool), fp.probe_changes));
        }
    }
    return report;
}

}  // namespace prtail
