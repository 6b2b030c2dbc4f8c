#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "prtail/graph.hpp"
#include "prtail/pagerank.hpp"
#include "prtail/simulator.hpp"
#include "prtail/tail.hpp"
#include "prtail/theory.hpp"

namespace prtail {

inline constexpr int kReportSchemaVersion = 1;

struct AnalysisOptions {
    std::vector<double> dampings;
    std::set<int> snapshot_iters;
    double tol = 1e-10;
    int max_iters = 200;
    std::optional<double> xmin;   ///< in-degree threshold override
    std::optional<double> alpha;  ///< exponent used by the coefficients instead of the fitted one
    unsigned threads = 1;
};

/// One PageRank vector (a snapshot iteration or the final one) compared with its prediction.
struct RankConfiguration {
    std::optional<int> iteration;  ///< empty for the final vector
    CcdfSeries ccdf;
    std::optional<TailFit> fit;
    std::optional<double> coefficient;
    std::optional<PredictedLine> predicted;
    std::optional<double> observed_intercept;  ///< slope pinned to the in-degree exponent
    std::optional<double> residual;            ///< observed minus predicted intercept
};

struct DampingAnalysis {
    double c = 0.0;
    int iters_run = 0;
    bool converged = false;
    double dangling_mass = 0.0;
    std::optional<CoefficientTable> coefficients;
    std::vector<RankConfiguration> configurations;
};

struct AnalysisReport {
    DegreeProfile profile;
    CcdfSeries indegree_ccdf;
    std::optional<TailFit> indegree_fit;
    std::optional<double> theory_alpha;
    std::vector<DampingAnalysis> dampings;
    std::vector<std::string> warnings;
};

/// degree statistics -> in-degree fit -> PageRank per damping -> coefficients -> predicted lines.
/// Fitting problems leave the corresponding fields empty and add a warning.
AnalysisReport analyze_graph(const Graph& g, const AnalysisOptions& options);

nlohmann::json to_json(const AnalysisReport& report);

/// Table of C_1..C_max_k, C and the lower bound; predicted lines when an in-degree fit is given.
nlohmann::json prediction_json(const TheoryParams& params, int max_k,
                               const std::optional<TailFit>& indegree_fit);

struct SimulationTarget {
    std::optional<int> generations;  ///< empty: run to the fixed point
};

struct SimulationOutcome {
    SimulationTarget target;
    SamplePool pool;
    nlohmann::json summary;
};

struct SimulationReport {
    std::vector<SimulationOutcome> outcomes;
    bool degenerate = false;  ///< c == 0: every sample equals 1
    nlohmann::json to_json(const ModelSpec& spec) const;
};

/// Runs each target, compares tails with C_k P(T > x) and checks the pool invariants.
SimulationReport run_simulation(const ModelSpec& spec, const std::vector<SimulationTarget>& targets,
                                const SimulationOptions& options);

}  // namespace prtail
