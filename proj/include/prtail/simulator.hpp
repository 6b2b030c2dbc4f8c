#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace prtail {

using Rng = std::mt19937_64;

/// Deterministic generator for stream (seed, a, b); distinct tuples give independent streams.
Rng make_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

/// Lists every invalid field of a model description.
class SpecValidationError : public std::invalid_argument {
public:
    explicit SpecValidationError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    std::vector<std::string> problems_;
};

class NonConvergence : public std::runtime_error {
public:
    NonConvergence(int generations, double last_change);
    int generations() const noexcept { return generations_; }
    double last_change() const noexcept { return last_change_; }

private:
    int generations_;
    double last_change_;
};

/**
 * Independent-model description of the rank recursion
 *
 *   R =d c * sum_{j=1}^{N} R_j / D_j + 1 - c(1 - p0)
 *
 * with N mixed Poisson over a Pareto rate T (index alpha, E T = d) and D size-biased from the
 * out-degree histogram (entry j holds p_j, entry 0 is p0).
 */
struct ModelSpec {
    double c = 0.85;
    double alpha = 1.1;
    double d = 8.0;
    std::vector<double> outdeg_hist;
    std::size_t pool_size = 1'000'000;
    std::uint64_t seed = 1;

    double p0() const { return outdeg_hist.empty() ? 0.0 : outdeg_hist[0]; }
    /// Pareto scale making E(T) = d.
    double t_min() const { return d * (alpha - 1.0) / alpha; }
    /// 1 - c(1 - p0); also the lower bound of every sample.
    double constant_term() const { return 1.0 - c * (1.0 - p0()); }

    /// Throws SpecValidationError naming every violated constraint.
    void validate() const;

    static ModelSpec from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

/// Reads an out-degree histogram given either as an array indexed by j or as {"j": p_j}.
/// Problems are appended to `problems`.
std::vector<double> histogram_from_json(const nlohmann::json& h, std::vector<std::string>& problems);

inline constexpr std::size_t kMinPoolSize = 10'000;

/// N = Poisson(T), T Pareto with P(T > x) = (x / t_min)^-alpha for x >= t_min.
class IndegreeSampler {
public:
    IndegreeSampler(double alpha, double d);

    double sample_rate(Rng& rng) const;
    std::uint64_t operator()(Rng& rng) const;

    double t_min() const noexcept { return t_min_; }
    /// Exact P(T > x).
    double rate_ccdf(double x) const;

private:
    double alpha_;
    double t_min_;
};

/// Draws D with P(D = j) = j p_j / sum_i i p_i, j >= 1, by inverse-CDF lookup.
class EffectiveOutdegreeSampler {
public:
    explicit EffectiveOutdegreeSampler(std::span<const double> outdeg_hist);
    std::uint64_t operator()(Rng& rng) const;

    /// (j, P(D = j)) over the support.
    std::vector<std::pair<std::uint64_t, double>> law() const;

private:
    std::vector<std::uint64_t> support_;
    std::vector<double> cumulative_;
};

/// Current generation of R^(k) samples.
struct SamplePool {
    std::vector<double> values;
    int generation = 0;

    double mean() const;
};

/// R^(0) = 1 for every sample.
SamplePool initial_pool(const ModelSpec& spec);

/**
 * One step of population dynamics: every new sample draws its own N and N pairs
 * (D_j, R_j), with R_j taken uniformly with replacement from `prev`. Samples are generated in
 * fixed blocks with streams keyed by (seed, generation, block), so the pool is the same for any
 * thread count. When `indegrees` is non-null it receives the N drawn for each new sample.
 */
SamplePool iterate_pool(const SamplePool& prev, const ModelSpec& spec, unsigned threads = 1,
                        std::vector<std::uint64_t>* indegrees = nullptr);

struct SimulationOptions {
    unsigned threads = 1;
    int max_generations = 200;
    double ccdf_tolerance = 1e-3;
    int probe_count = 20;
};

/// k generations from R^(0) = 1.
SamplePool simulate_R(const ModelSpec& spec, int k, const SimulationOptions& options = {});

struct FixedPointResult {
    SamplePool pool;
    std::vector<double> probe_changes;  ///< max |CCDF change| at the probes, per generation >= 2
};

/**
 * Iterates until the pool's CCDF, evaluated at `probe_count` log-spaced points spanning the
 * previous pool's [1e-3, 1e-1] exceedance range, moves by less than `ccdf_tolerance`.
 * Throws NonConvergence after `max_generations`.
 */
FixedPointResult simulate_fixed_point(const ModelSpec& spec, const SimulationOptions& options = {});

/// Probe abscissae: log-spaced between the x with exceedance `upper` and with exceedance `lower`.
std::vector<double> probe_points(std::span<const double> values, int count, double lower = 1e-3,
                                 double upper = 1e-1);

/// Fraction of values strictly greater than x, for each probe.
std::vector<double> ccdf_at(std::span<const double> values, std::span<const double> probes);

struct YLevelResult {
    std::vector<std::vector<double>> levels;  ///< levels[s][n] = Y^(n) of sample s, n = 0..level
    std::size_t aborted = 0;
    std::size_t requested = 0;

    double abort_rate() const;
    /// Y^(n) over completed samples.
    std::vector<double> level(int n) const;
};

inline constexpr std::uint64_t kDefaultNodeBudget = 10'000'000;

/**
 * Explicit Galton-Watson expansion with offspring N and edge weights 1/D; Y^(n) is the total
 * weight of generation n. Samples whose tree exceeds `node_budget` nodes are dropped and counted.
 */
YLevelResult simulate_Y_levels(const ModelSpec& spec, int level, std::size_t samples,
                               std::uint64_t node_budget = kDefaultNodeBudget);

struct TailRatioRow {
    double x = 0.0;
    double empirical_ccdf = 0.0;
    double theory_ccdf = 0.0;  ///< C * P(T > x)
    double ratio = 0.0;
};

/// Empirical CCDF against C * P(T > x) at `probes` abscissae whose empirical exceedance is
/// log-spaced over [lower, upper].
std::vector<TailRatioRow> tail_ratio_table(std::span<const double> values, const ModelSpec& spec,
                                           double C, double lower = 1e-5, double upper = 1e-3,
                                           int probes = 9);

struct BinnedMean {
    std::uint64_t indegree = 0;
    double mean = 0.0;
    std::size_t count = 0;
};

/// Mean of `ranks` grouped by equal `indegrees`, keeping groups with at least `min_count` members.
std::vector<BinnedMean> conditional_means(std::span<const std::uint64_t> indegrees,
                                          std::span<const double> ranks, std::size_t min_count);

struct AffineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Ordinary least squares of bin mean on in-degree.
AffineFit fit_affine(std::span<const BinnedMean> bins);

}  // namespace prtail
