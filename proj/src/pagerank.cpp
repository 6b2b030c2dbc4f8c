#include "prtail/pagerank.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "prtail/parallel.hpp"

namespace prtail {

namespace {

constexpr std::size_t kBlock = 1 << 15;

std::size_t num_blocks(std::size_t n) { return (n + kBlock - 1) / kBlock; }

// Sum of per-block partials in block order; identical for any thread count.
template <typename Fn>
double blocked_sum(std::size_t n, unsigned threads, Fn&& term) {
    std::vector<double> partial(num_blocks(n), 0.0);
    detail::for_each_block(partial.size(), threads, [&](std::size_t b) {
        const std::size_t lo = b * kBlock;
        const std::size_t hi = std::min(n, lo + kBlock);
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += term(i);
        partial[b] = s;
    });
    double total = 0.0;
    for (double s : partial) total += s;
    return total;
}

}  // namespace

void PageRankParams::validate() const {
    if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("damping factor must lie in (0, 1)");
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    if (max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
    for (int k : snapshot_iters)
        if (k < 0) throw std::invalid_argument("snapshot iterations must be non-negative");
}

PageRankResult pagerank(const Graph& g, const PageRankParams& params) {
    params.validate();
    const std::size_t n = g.num_nodes();
    if (n == 0) throw std::invalid_argument("pagerank needs at least one node");

    PageRankResult result;
    std::vector<double> current(n, 1.0);
    std::vector<double> next(n, 0.0);
    std::vector<double> share(n, 0.0);  // R(j) / d_j, zero for dangling j
    const auto inv_n = 1.0 / static_cast<double>(n);
    const unsigned threads = params.threads;

    if (params.snapshot_iters.contains(0)) result.snapshots.emplace(0, current);

    for (int k = 1; k <= params.max_iters; ++k) {
        const double dangling = blocked_sum(n, threads, [&](std::size_t j) {
            return g.is_dangling(static_cast<node_t>(j)) ? current[j] : 0.0;
        }) * inv_n;

        detail::for_each_block(num_blocks(n), threads, [&](std::size_t b) {
            const std::size_t hi = std::min(n, (b + 1) * kBlock);
            for (std::size_t j = b * kBlock; j < hi; ++j) {
                const auto dj = g.out_degree(static_cast<node_t>(j));
                share[j] = dj == 0 ? 0.0 : current[j] / static_cast<double>(dj);
            }
        });

        const double base = params.c * dangling + (1.0 - params.c);
        detail::for_each_block(num_blocks(n), threads, [&](std::size_t b) {
            const std::size_t hi = std::min(n, (b + 1) * kBlock);
            for (std::size_t i = b * kBlock; i < hi; ++i) {
                double gathered = 0.0;
                for (node_t j : g.in_neighbors(static_cast<node_t>(i))) gathered += share[j];
                next[i] = params.c * gathered + base;
            }
        });

        const double residual =
            blocked_sum(n, threads, [&](std::size_t i) { return std::abs(next[i] - current[i]); }) *
            inv_n;
        current.swap(next);
        result.residuals.push_back(residual);
        result.iters_run = k;
        if (params.snapshot_iters.contains(k)) result.snapshots.emplace(k, current);
        if (residual <= params.tol) {
            result.converged = true;
            break;
        }
    }
    result.scores = std::move(current);
    return result;
}

std::span<const double> iteration_snapshot(const PageRankResult& result, int k) {
    auto it = result.snapshots.find(k);
    if (it == result.snapshots.end())
        throw std::out_of_range("no snapshot retained for iteration " + std::to_string(k));
    return it->second;
}

double dangling_mass_fraction(std::span<const double> scores, const Graph& g) {
    if (scores.size() != g.num_nodes())
        throw std::invalid_argument("score vector length differs from node count");
    double mass = 0.0;
    for (node_t j = 0; j < g.num_nodes(); ++j)
        if (g.is_dangling(j)) mass += scores[j];
    return mass / static_cast<double>(g.num_nodes());
}

void write_scores_csv(const Graph& g, std::span<const double> scores, std::ostream& out) {
    out << "node_id,score\n";
    const auto old_precision = out.precision(17);
    for (node_t v = 0; v < g.num_nodes(); ++v) out << g.original_id(v) << ',' << scores[v] << '\n';
    out.precision(old_precision);
}

}  // namespace prtail
