#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "prtail/graph.hpp"

namespace prtail::testing {

inline double bisect(const std::function<double(double)>& f, double lo, double hi, int steps = 200) {
    double flo = f(lo);
    if (flo * f(hi) > 0) throw std::runtime_error("bisect: root not bracketed");
    for (int i = 0; i < steps; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

inline double hist_mean(const std::vector<double>& hist) {
    double m = 0.0;
    for (std::size_t j = 0; j < hist.size(); ++j) m += static_cast<double>(j) * hist[j];
    return m;
}

inline double hist_b(const std::vector<double>& hist, double alpha) {
    double b = 0.0;
    for (std::size_t j = 1; j < hist.size(); ++j) b += hist[j] * std::pow(static_cast<double>(j), 1.0 - alpha);
    return b;
}

/// Out-degree histogram with mean 8.2, p0 = 0.006 and b = 0.8558 at alpha = 1.1: a mixture of a
/// truncated power law on 1..100 and a geometric law, both with the same conditional mean.
inline std::vector<double> stanford_like_hist() {
    constexpr double p0 = 0.006;
    constexpr double mean = 8.2;
    constexpr double alpha = 1.1;
    constexpr double target_b = 0.8558;
    constexpr std::size_t kPowerMax = 100;
    constexpr std::size_t kGeoMax = 5000;
    const double cond_mean = mean / (1.0 - p0);

    auto power_law = [&](double s) {
        std::vector<double> q(kPowerMax + 1, 0.0);
        double z = 0.0;
        for (std::size_t j = 1; j <= kPowerMax; ++j) z += q[j] = std::pow(static_cast<double>(j), -s);
        for (auto& v : q) v /= z;
        return q;
    };
    const double s = bisect([&](double e) { return hist_mean(power_law(e)) - cond_mean; }, 0.0, 3.0);
    const auto tpl = power_law(s);

    std::vector<double> geo(kGeoMax + 1, 0.0);
    {
        const double q = 1.0 / cond_mean;
        double z = 0.0;
        for (std::size_t j = 1; j <= kGeoMax; ++j) z += geo[j] = q * std::pow(1.0 - q, static_cast<double>(j - 1));
        for (auto& v : geo) v /= z;
    }

    auto mix = [&](double lambda) {
        std::vector<double> h(kGeoMax + 1, 0.0);
        h[0] = p0;
        for (std::size_t j = 1; j <= kGeoMax; ++j)
            h[j] = (1.0 - p0) * ((j <= kPowerMax ? lambda * tpl[j] : 0.0) + (1.0 - lambda) * geo[j]);
        return h;
    };
    const double lambda = bisect([&](double l) { return hist_b(mix(l), alpha) - target_b; }, 0.0, 1.0);
    return mix(lambda);
}

/// Dense solve of the scale-free PageRank system (I - c M) R = (1 - c) 1.
inline std::vector<double> dense_pagerank(const Graph& g, double c) {
    const auto n = static_cast<Eigen::Index>(g.num_nodes());
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
    for (node_t i = 0; i < g.num_nodes(); ++i)
        for (node_t j : g.in_neighbors(i)) a(i, j) -= c / static_cast<double>(g.out_degree(j));
    for (node_t j = 0; j < g.num_nodes(); ++j)
        if (g.out_degree(j) == 0)
            for (Eigen::Index i = 0; i < n; ++i) a(i, j) -= c / static_cast<double>(n);
    const Eigen::VectorXd rhs = Eigen::VectorXd::Constant(n, 1.0 - c);
    const Eigen::VectorXd r = a.fullPivLu().solve(rhs);
    return {r.data(), r.data() + n};
}

/// Random directed multigraph on 1..max_n nodes; self-loops and repeated edges allowed.
inline Graph random_small_graph(std::mt19937_64& rng, node_t max_n) {
    const auto n = std::uniform_int_distribution<node_t>(1, max_n)(rng);
    const auto m = std::uniform_int_distribution<int>(0, static_cast<int>(2 * n * n / 3 + 1))(rng);
    std::uniform_int_distribution<node_t> node(0, n - 1);
    std::vector<std::pair<node_t, node_t>> edges;
    for (int e = 0; e < m; ++e) edges.emplace_back(node(rng), node(rng));
    return Graph::from_edges(n, edges);
}

/// Exact Pareto draws by inversion: P(X > x) = (x / x_min)^-alpha.
inline std::vector<double> pareto_samples(std::size_t count, double alpha, double x_min, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> out(count);
    for (auto& x : out) x = x_min * std::pow(1.0 - u(rng), -1.0 / alpha);
    return out;
}

inline Graph graph_from(node_t n, std::vector<std::pair<node_t, node_t>> edges) {
    return Graph::from_edges(n, edges);
}

}  // namespace prtail::testing
