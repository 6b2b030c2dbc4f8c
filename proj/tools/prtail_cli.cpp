// prtail: degree statistics, PageRank, tail fits, coefficient predictions, simulation and
// synthetic graphs from the command line.
//
// Exit codes: 0 success, 2 usage or validation error, 3 data error, 4 non-convergence.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "prtail/graph.hpp"
#include "prtail/pagerank.hpp"
#include "prtail/report.hpp"
#include "prtail/simulator.hpp"
#include "prtail/synthesis.hpp"
#include "prtail/tail.hpp"
#include "prtail/theory.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace prtail;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNoConvergence = 4;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotConverged : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Settings {
    std::vector<double> dampings{0.85};
    double tol = 1e-10;
    int max_iters = 200;
    std::vector<int> snapshots;
    std::optional<double> xmin;
    std::optional<double> alpha;
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
    std::string output_dir = ".";
    bool drop_self_loops = false;
    std::string config_path;
};

// Values from --config fill in whatever was not given on the command line.
void apply_config(CLI::App& app, Settings& s) {
    if (s.config_path.empty()) return;
    std::ifstream in(s.config_path);
    if (!in) throw UsageError("config: cannot open " + s.config_path);
    json cfg;
    try {
        cfg = json::parse(in);
    } catch (const json::parse_error& e) {
        throw UsageError("config: " + s.config_path + ": " + e.what());
    }
    if (!cfg.is_object()) throw UsageError("config: expected a JSON object");

    auto given = [&](const std::string& flag) {
        const auto* opt = app.get_option_no_throw("--" + flag);
        return opt != nullptr && opt->count() > 0;
    };
    try {
        for (const auto& [key, value] : cfg.items()) {
            if (given(key)) continue;
            if (key == "damping")
                s.dampings = value.is_array() ? value.get<std::vector<double>>()
                                              : std::vector<double>{value.get<double>()};
            else if (key == "tol")
                s.tol = value.get<double>();
            else if (key == "max-iters")
                s.max_iters = value.get<int>();
            else if (key == "snapshots")
                s.snapshots = value.get<std::vector<int>>();
            else if (key == "xmin")
                s.xmin = value.get<double>();
            else if (key == "alpha")
                s.alpha = value.get<double>();
            else if (key == "seed")
                s.seed = value.get<std::uint64_t>();
            else if (key == "threads")
                s.threads = value.get<unsigned>();
            else if (key == "output-dir")
                s.output_dir = value.get<std::string>();
            else if (key == "drop-self-loops")
                s.drop_self_loops = value.get<bool>();
            else
                throw UsageError("config: unknown key '" + key + "'");
        }
    } catch (const json::type_error& e) {
        throw UsageError(std::string("config: ") + e.what());
    }
    if (s.alpha && !(*s.alpha > 0.5 && *s.alpha < 3.0))
        throw UsageError("config: alpha must lie in (0.5, 3)");
}

std::string damping_tag(double c) {
    std::ostringstream out;
    out << "c" << c;
    return out.str();
}

fs::path output_path(const Settings& s, const std::string& name) {
    fs::create_directories(s.output_dir);
    return fs::path(s.output_dir) / name;
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    return out;
}

void write_json(const fs::path& path, const json& j) {
    auto out = open_output(path);
    out << j.dump(2) << '\n';
}

void write_ccdf(const fs::path& path, const CcdfSeries& series) {
    auto out = open_output(path);
    write_ccdf_csv(series, out);
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": no such file");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw UsageError(path + ": malformed JSON: " + e.what());
    }
}

Graph load(const std::string& path, const Settings& s) {
    return load_edge_list_file(path, EdgeListOptions{s.drop_self_loops});
}

int cmd_stats(const std::string& graph_path, const Settings& s) {
    const Graph g = load(graph_path, s);
    const json profile = to_json(degree_profile(g));
    std::cout << profile.dump(2) << '\n';
    return kExitOk;
}

int cmd_pagerank(const std::string& graph_path, const Settings& s) {
    const Graph g = load(graph_path, s);
    json summary = json::array();
    bool all_converged = true;
    for (double c : s.dampings) {
        PageRankParams params;
        params.c = c;
        params.tol = s.tol;
        params.max_iters = s.max_iters;
        params.snapshot_iters = {s.snapshots.begin(), s.snapshots.end()};
        params.threads = s.threads;
        const auto result = pagerank(g, params);
        all_converged = all_converged && result.converged;

        const std::string tag = damping_tag(c);
        {
            auto out = open_output(output_path(s, "scores_" + tag + ".csv"));
            write_scores_csv(g, result.scores, out);
        }
        for (const auto& [k, scores] : result.snapshots) {
            auto out = open_output(output_path(s, "scores_" + tag + "_iter" + std::to_string(k) + ".csv"));
            write_scores_csv(g, scores, out);
        }
        summary.push_back({{"c", c},
                           {"iterations_run", result.iters_run},
                           {"converged", result.converged},
                           {"final_residual", result.residuals.empty() ? 0.0 : result.residuals.back()},
                           {"dangling_mass", dangling_mass_fraction(result.scores, g)}});
    }
    std::cout << summary.dump(2) << '\n';
    if (!all_converged) throw NotConverged("PageRank did not reach the tolerance within max-iters");
    return kExitOk;
}

int cmd_analyze(const std::string& graph_path, const Settings& s) {
    const Graph g = load(graph_path, s);
    AnalysisOptions options;
    options.dampings = s.dampings;
    options.snapshot_iters = {s.snapshots.begin(), s.snapshots.end()};
    options.tol = s.tol;
    options.max_iters = s.max_iters;
    options.xmin = s.xmin;
    options.alpha = s.alpha;
    options.threads = s.threads;
    const auto report = analyze_graph(g, options);

    write_ccdf(output_path(s, "indegree_ccdf.csv"), report.indegree_ccdf);
    for (const auto& entry : report.dampings) {
        for (const auto& config : entry.configurations) {
            std::string name = "pagerank_" + damping_tag(entry.c);
            if (config.iteration) name += "_iter" + std::to_string(*config.iteration);
            write_ccdf(output_path(s, name + "_ccdf.csv"), config.ccdf);
        }
    }
    const json j = to_json(report);
    write_json(output_path(s, "report.json"), j);
    std::cout << j.dump(2) << '\n';
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
    for (const auto& entry : report.dampings)
        if (!entry.converged) return kExitNoConvergence;
    return kExitOk;
}

struct PredictInputs {
    std::string graph_path;
    std::optional<double> d;
    std::optional<double> p0;
    std::optional<double> b;
    std::string hist_path;
    std::optional<double> indegree_intercept;
};

int cmd_predict(const PredictInputs& in, const Settings& s) {
    int max_k = 1;
    for (int k : s.snapshots) max_k = std::max(max_k, k);

    std::optional<TailFit> fit;
    std::optional<DegreeProfile> profile;
    std::vector<double> hist;
    if (!in.graph_path.empty()) {
        const Graph g = load(in.graph_path, s);
        profile = degree_profile(g);
        std::vector<double> indegrees(g.num_nodes());
        for (node_t v = 0; v < g.num_nodes(); ++v) indegrees[v] = static_cast<double>(g.in_degree(v));
        const double threshold = s.xmin ? *s.xmin : choose_xmin(indegrees).x_min;
        fit = fit_exponent_mle(indegrees, threshold);
    } else if (!in.hist_path.empty()) {
        std::vector<std::string> problems;
        hist = histogram_from_json(read_json_file(in.hist_path), problems);
        if (!problems.empty()) throw SpecValidationError(std::move(problems));
    }
    if (!s.alpha && !fit) throw UsageError("predict: --alpha is required without a graph");
    const double alpha = s.alpha ? *s.alpha : fit->alpha_hat;
    if (!fit && in.indegree_intercept) {
        TailFit assumed;
        assumed.alpha_hat = alpha;
        assumed.intercept = *in.indegree_intercept;
        fit = assumed;
    }

    json out = json::array();
    for (double c : s.dampings) {
        TheoryParams params;
        if (profile) {
            params = TheoryParams::from_profile(c, alpha, *profile);
        } else if (!hist.empty()) {
            double mean = 0.0;
            for (std::size_t j = 0; j < hist.size(); ++j) mean += static_cast<double>(j) * hist[j];
            params = TheoryParams::from_histogram(c, alpha, in.d.value_or(mean), hist);
        } else {
            if (!in.d || !in.p0 || !in.b)
                throw UsageError("predict: give a graph, --hist, or all of --d, --p0 and --b");
            params = TheoryParams::from_values(c, alpha, *in.d, *in.p0, *in.b);
        }
        out.push_back(prediction_json(params, max_k, fit));
    }
    std::cout << out.dump(2) << '\n';
    return kExitOk;
}

struct SimulateInputs {
    std::string spec_path;
    std::optional<std::size_t> pool_size;
    bool skip_fixed_point = false;
    int max_generations = 200;
};

int cmd_simulate(const SimulateInputs& in, const Settings& s) {
    ModelSpec spec = ModelSpec::from_json(read_json_file(in.spec_path));
    if (s.seed) spec.seed = *s.seed;
    if (in.pool_size) spec.pool_size = *in.pool_size;

    std::vector<SimulationTarget> targets;
    for (int k : s.snapshots.empty() ? std::vector<int>{1, 2} : s.snapshots) {
        if (k < 0) throw UsageError("simulate: generations must be non-negative");
        targets.push_back({k});
    }
    if (!in.skip_fixed_point) targets.push_back({std::nullopt});

    SimulationOptions options;
    options.threads = s.threads;
    options.max_generations = in.max_generations;
    const auto report = run_simulation(spec, targets, options);

    for (const auto& outcome : report.outcomes) {
        const std::string name = outcome.target.generations
                                     ? "pool_k" + std::to_string(*outcome.target.generations)
                                     : std::string("pool_converged");
        write_ccdf(output_path(s, name + "_ccdf.csv"), ccdf(outcome.pool.values));
    }
    const json j = report.to_json(spec);
    write_json(output_path(s, "simulation.json"), j);
    std::cout << j.dump(2) << '\n';
    return kExitOk;
}

struct GenerateInputs {
    std::string spec_path;
    std::optional<std::size_t> n;
};

int cmd_generate(const GenerateInputs& in, const Settings& s) {
    SynthSpec spec = SynthSpec::from_json(read_json_file(in.spec_path));
    if (s.seed) spec.seed = *s.seed;
    if (in.n) spec.n = *in.n;
    const auto result = generate(spec);
    {
        auto out = open_output(output_path(s, "graph.tsv"));
        write_edge_list(result.graph, out);
    }
    const json sidecar = sidecar_json(spec, result);
    write_json(output_path(s, "graph.json"), sidecar);
    std::cout << sidecar.dump(2) << '\n';
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PageRank tail analysis toolkit"};
    app.require_subcommand(1);
    Settings s;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", s.config_path, "JSON file with default flag values");
        cmd->add_option("--output-dir", s.output_dir, "Directory for CSV and JSON outputs");
        cmd->add_option("--threads", s.threads, "Worker threads")->check(CLI::PositiveNumber);
        cmd->add_flag("--drop-self-loops", s.drop_self_loops, "Discard self-loops when loading");
    };
    auto add_damping = [&](CLI::App* cmd) {
        cmd->add_option("--damping", s.dampings, "Damping factor c (repeatable)")
            ->check(CLI::Range(0.0, 1.0))
            ->take_all()
            ->allow_extra_args(false);
    };
    auto add_iteration = [&](CLI::App* cmd) {
        cmd->add_option("--tol", s.tol, "L1 residual tolerance per node")->check(CLI::PositiveNumber);
        cmd->add_option("--max-iters", s.max_iters, "Iteration cap")->check(CLI::NonNegativeNumber);
    };
    auto add_snapshots = [&](CLI::App* cmd, const std::string& help) {
        cmd->add_option("--snapshots", s.snapshots, help)->delimiter(',');
    };
    auto add_alpha = [&](CLI::App* cmd) {
        cmd->add_option("--alpha", s.alpha, "Tail exponent used for the coefficients")
            ->check(CLI::Range(0.5, 3.0));
    };

    std::string graph_path;

    auto* stats = app.add_subcommand("stats", "Degree profile of an edge list");
    stats->add_option("graph", graph_path, "Edge list (.gz accepted)")->required();
    add_common(stats);

    auto* pr = app.add_subcommand("pagerank", "Scale-free PageRank scores");
    pr->add_option("graph", graph_path, "Edge list (.gz accepted)")->required();
    add_common(pr);
    add_damping(pr);
    add_iteration(pr);
    add_snapshots(pr, "Iterations to export, comma separated");

    auto* analyze = app.add_subcommand("analyze", "Fit tails and compare with predicted lines");
    analyze->add_option("graph", graph_path, "Edge list (.gz accepted)")->required();
    add_common(analyze);
    add_damping(analyze);
    add_iteration(analyze);
    add_snapshots(analyze, "Iterations to compare, comma separated");
    analyze->add_option("--xmin", s.xmin, "In-degree tail threshold")->check(CLI::PositiveNumber);
    add_alpha(analyze);

    PredictInputs predict_in;
    auto* predict = app.add_subcommand("predict", "Tail coefficients and predicted lines");
    predict->add_option("graph", predict_in.graph_path, "Edge list to take the profile from");
    add_common(predict);
    add_damping(predict);
    add_snapshots(predict, "Largest iteration count is the last C_k listed");
    add_alpha(predict);
    predict->add_option("--xmin", s.xmin, "In-degree tail threshold")->check(CLI::PositiveNumber);
    predict->add_option("--d", predict_in.d, "Mean degree")->check(CLI::PositiveNumber);
    predict->add_option("--p0", predict_in.p0, "Dangling fraction")->check(CLI::Range(0.0, 1.0));
    predict->add_option("--b", predict_in.b, "Out-degree coefficient")->check(CLI::NonNegativeNumber);
    predict->add_option("--hist", predict_in.hist_path, "JSON out-degree histogram")->check(CLI::ExistingFile);
    predict->add_option("--indegree-intercept", predict_in.indegree_intercept,
                        "log10 intercept of the in-degree CCDF line");

    SimulateInputs simulate_in;
    auto* simulate = app.add_subcommand("simulate", "Population dynamics for the rank recursion");
    simulate->add_option("spec", simulate_in.spec_path, "Model spec JSON")->required();
    add_common(simulate);
    add_snapshots(simulate, "Generations to report, comma separated (default 1,2)");
    simulate->add_option("--seed", s.seed, "Overrides the spec seed");
    simulate->add_option("--pool-size", simulate_in.pool_size, "Overrides the spec pool size");
    simulate->add_option("--max-generations", simulate_in.max_generations,
                         "Generation cap for the fixed point")
        ->check(CLI::PositiveNumber);
    simulate->add_flag("--skip-fixed-point", simulate_in.skip_fixed_point,
                       "Only run the requested generations");

    GenerateInputs generate_in;
    auto* gen = app.add_subcommand("generate", "Synthetic graph with a prescribed degree law");
    gen->add_option("spec", generate_in.spec_path, "Synthesis spec JSON")->required();
    add_common(gen);
    gen->add_option("--seed", s.seed, "Overrides the spec seed");
    gen->add_option("--n", generate_in.n, "Overrides the node count");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        CLI::App* cmd = app.get_subcommands().front();
        apply_config(*cmd, s);
        if (cmd == stats) return cmd_stats(graph_path, s);
        if (cmd == pr) return cmd_pagerank(graph_path, s);
        if (cmd == analyze) return cmd_analyze(graph_path, s);
        if (cmd == predict) return cmd_predict(predict_in, s);
        if (cmd == simulate) return cmd_simulate(simulate_in, s);
        if (cmd == gen) return cmd_generate(generate_in, s);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const SpecValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const NotConverged& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNoConvergence;
    } catch (const NonConvergence& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNoConvergence;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const InsufficientTail& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitUsage;
}
