#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <vector>

#include "prtail/graph.hpp"

namespace prtail {

struct PageRankParams {
    double c = 0.85;            ///< damping factor, 0 < c < 1
    double tol = 1e-10;         ///< stop when (1/n) sum |R_k - R_{k-1}| <= tol
    int max_iters = 200;
    std::set<int> snapshot_iters;  ///< iterations whose full vector is retained (0 = start)
    unsigned threads = 1;

    void validate() const;
};

/// Scale-free scores R(i) = n PR(i); their mean is 1.
struct PageRankResult {
    std::vector<double> scores;
    int iters_run = 0;
    bool converged = false;
    std::vector<double> residuals;  ///< residuals[k-1] is the L1 change of iteration k
    std::map<int, std::vector<double>> snapshots;
};

/**
 * Power iteration on
 *
 *   R_k(i) = c * sum_{j -> i} R_{k-1}(j) / d_j + c * (1/n) * sum_{j dangling} R_{k-1}(j) + (1 - c)
 *
 * starting from R_0 = 1. Every iteration reads only the previous vector, so iteration k's
 * snapshot is exactly the k-th power iterate. With threads > 1 destinations are split across
 * workers; all reductions run over fixed blocks so the output does not depend on the thread count.
 */
PageRankResult pagerank(const Graph& g, const PageRankParams& params);

/// Stored vector of iteration k. Throws std::out_of_range if k was not retained.
std::span<const double> iteration_snapshot(const PageRankResult& result, int k);

/// (1/n) * sum of the scores of dangling nodes.
double dangling_mass_fraction(std::span<const double> scores, const Graph& g);

/// "node_id,score" with original ids.
void write_scores_csv(const Graph& g, std::span<const double> scores, std::ostream& out);

}  // namespace prtail
