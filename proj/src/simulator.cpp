#include "prtail/simulator.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "prtail/parallel.hpp"

namespace prtail {

namespace {

constexpr std::size_t kPoolBlock = 1 << 14;
constexpr std::uint64_t kTreeStreamTag = 0x5945'4c56'4c00'0000ULL;  // distinct from generations

double unit_open_left(Rng& rng) {
    // (0, 1]: keeps u^(-1/alpha) finite.
    return 1.0 - std::generate_canonical<double, 53>(rng);
}

std::string join_problems(const std::vector<std::string>& problems) {
    std::ostringstream out;
    out << "invalid model spec:";
    for (const auto& p : problems) out << "\n  - " << p;
    return out.str();
}

// Fraction strictly above x for each probe, over already sorted values.
std::vector<double> ccdf_sorted(std::span<const double> sorted, std::span<const double> probes) {
    std::vector<double> out;
    out.reserve(probes.size());
    const auto n = static_cast<double>(sorted.size());
    for (double x : probes) {
        auto it = std::upper_bound(sorted.begin(), sorted.end(), x);
        out.push_back(static_cast<double>(sorted.end() - it) / n);
    }
    return out;
}

double quantile_for_exceedance(std::span<const double> sorted, double exceedance) {
    const auto n = sorted.size();
    const auto above = static_cast<std::size_t>(std::ceil(exceedance * static_cast<double>(n)));
    const std::size_t idx = above >= n ? 0 : n - std::max<std::size_t>(above, 1);
    return sorted[idx];
}

std::vector<double> probes_sorted(std::span<const double> sorted, int count, double lower,
                                  double upper) {
    const double x_lo = quantile_for_exceedance(sorted, upper);
    const double x_hi = quantile_for_exceedance(sorted, lower);
    std::vector<double> probes;
    probes.reserve(static_cast<std::size_t>(count));
    if (count == 1 || !(x_lo > 0.0) || x_hi <= x_lo) {
        probes.assign(static_cast<std::size_t>(count), x_lo);
        return probes;
    }
    const double step = std::log(x_hi / x_lo) / (count - 1);
    for (int i = 0; i < count; ++i) probes.push_back(x_lo * std::exp(step * i));
    return probes;
}

std::vector<double> sorted_copy(std::span<const double> values) {
    std::vector<double> s(values.begin(), values.end());
    std::sort(s.begin(), s.end());
    return s;
}

}  // namespace

Rng make_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(a),    static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b),    static_cast<std::uint32_t>(b >> 32)};
    return Rng(seq);
}

SpecValidationError::SpecValidationError(std::vector<std::string> problems)
    : std::invalid_argument(join_problems(problems)), problems_(std::move(problems)) {}

NonConvergence::NonConvergence(int generations, double last_change)
    : std::runtime_error("pool did not converge within " + std::to_string(generations) +
                         " generations (last max CCDF change " + std::to_string(last_change) + ")"),
      generations_(generations),
      last_change_(last_change) {}

void ModelSpec::validate() const {
    std::vector<std::string> problems;
    if (!(c >= 0.0 && c < 1.0)) problems.emplace_back("c: damping must lie in [0, 1)");
    if (!(alpha > 1.0 && std::isfinite(alpha)))
        problems.emplace_back("alpha: tail index must exceed 1 so that E(T) = d is finite");
    if (!(d > 0.0 && std::isfinite(d))) problems.emplace_back("d: mean in-degree must be positive");
    if (pool_size < kMinPoolSize)
        problems.emplace_back("pool_size: must be at least " + std::to_string(kMinPoolSize));

    if (outdeg_hist.empty()) {
        problems.emplace_back("outdeg_hist: empty");
    } else {
        double total = 0.0;
        double first_moment = 0.0;
        bool negative = false;
        for (std::size_t j = 0; j < outdeg_hist.size(); ++j) {
            negative |= outdeg_hist[j] < 0.0;
            total += outdeg_hist[j];
            first_moment += static_cast<double>(j) * outdeg_hist[j];
        }
        if (negative) problems.emplace_back("outdeg_hist: negative entry");
        if (std::abs(total - 1.0) > 1e-9)
            problems.emplace_back("outdeg_hist: entries sum to " + std::to_string(total) + ", not 1");
        if (!(first_moment > 0.0)) {
            problems.emplace_back("outdeg_hist: all mass at out-degree 0");
        } else if (d > 0.0 && std::abs(first_moment - d) > 1e-6 * d) {
            problems.emplace_back("outdeg_hist: mean out-degree " + std::to_string(first_moment) +
                                  " differs from d = " + std::to_string(d));
        }
        if (problems.empty() && c > 0.0) {
            double b = 0.0;
            for (std::size_t j = 1; j < outdeg_hist.size(); ++j)
                b += outdeg_hist[j] * std::pow(static_cast<double>(j), 1.0 - alpha);
            if (!(std::pow(c, alpha) * b < 1.0))
                problems.emplace_back("c, alpha, outdeg_hist: c^alpha * b >= 1");
        }
    }
    if (!problems.empty()) throw SpecValidationError(std::move(problems));
}

std::vector<double> histogram_from_json(const nlohmann::json& h, std::vector<std::string>& problems) {
    std::vector<double> hist;
    if (h.is_array()) {
        for (const auto& v : h) {
            if (!v.is_number()) {
                problems.emplace_back("outdeg_hist: non-numeric entry");
                return {};
            }
            hist.push_back(v.get<double>());
        }
    } else if (h.is_object()) {
        std::map<std::uint64_t, double> sparse;
        for (const auto& [key, v] : h.items()) {
            std::uint64_t deg = 0;
            std::istringstream parse(key);
            if (!(parse >> deg) || !parse.eof() || !v.is_number()) {
                problems.emplace_back("outdeg_hist: bad entry '" + key + "'");
                continue;
            }
            sparse[deg] = v.get<double>();
        }
        if (!sparse.empty()) {
            hist.assign(sparse.rbegin()->first + 1, 0.0);
            for (const auto& [deg, p] : sparse) hist[deg] = p;
        }
    } else {
        problems.emplace_back("outdeg_hist: expected an array or an object");
    }
    return hist;
}

ModelSpec ModelSpec::from_json(const nlohmann::json& j) {
    std::vector<std::string> problems;
    ModelSpec spec;
    if (!j.is_object()) throw SpecValidationError({"spec: expected a JSON object"});

    auto number = [&](const char* key, double& out, bool required) {
        if (!j.contains(key)) {
            if (required) problems.emplace_back(std::string(key) + ": missing");
            return;
        }
        if (!j.at(key).is_number()) {
            problems.emplace_back(std::string(key) + ": expected a number");
            return;
        }
        out = j.at(key).get<double>();
    };
    number("c", spec.c, true);
    number("alpha", spec.alpha, true);
    number("d", spec.d, true);

    if (j.contains("pool_size")) {
        if (j.at("pool_size").is_number_unsigned())
            spec.pool_size = j.at("pool_size").get<std::size_t>();
        else
            problems.emplace_back("pool_size: expected a positive integer");
    }
    if (j.contains("seed")) {
        if (j.at("seed").is_number_unsigned())
            spec.seed = j.at("seed").get<std::uint64_t>();
        else
            problems.emplace_back("seed: expected a non-negative integer");
    }

    if (j.contains("outdeg_hist"))
        spec.outdeg_hist = histogram_from_json(j.at("outdeg_hist"), problems);
    else
        problems.emplace_back("outdeg_hist: missing");
    if (!problems.empty()) throw SpecValidationError(std::move(problems));
    spec.validate();
    return spec;
}

nlohmann::json ModelSpec::to_json() const {
    return {{"c", c},           {"alpha", alpha},
            {"d", d},           {"outdeg_hist", outdeg_hist},
            {"pool_size", pool_size}, {"seed", seed}};
}

IndegreeSampler::IndegreeSampler(double alpha, double d)
    : alpha_(alpha), t_min_(d * (alpha - 1.0) / alpha) {
    if (!(alpha > 1.0) || !(d > 0.0))
        throw std::invalid_argument("in-degree sampler needs alpha > 1 and d > 0");
}

double IndegreeSampler::sample_rate(Rng& rng) const {
    return t_min_ * std::pow(unit_open_left(rng), -1.0 / alpha_);
}

std::uint64_t IndegreeSampler::operator()(Rng& rng) const {
    std::poisson_distribution<std::int64_t> poisson(sample_rate(rng));
    return static_cast<std::uint64_t>(poisson(rng));
}

double IndegreeSampler::rate_ccdf(double x) const {
    return x <= t_min_ ? 1.0 : std::pow(x / t_min_, -alpha_);
}

EffectiveOutdegreeSampler::EffectiveOutdegreeSampler(std::span<const double> outdeg_hist) {
    double mass = 0.0;
    for (std::size_t j = 1; j < outdeg_hist.size(); ++j) {
        if (outdeg_hist[j] <= 0.0) continue;
        const double w = static_cast<double>(j) * outdeg_hist[j];
        mass += w;
        support_.push_back(j);
        cumulative_.push_back(mass);
    }
    if (support_.empty())
        throw std::invalid_argument("out-degree histogram has all mass at out-degree 0");
    for (double& cum : cumulative_) cum /= mass;
    cumulative_.back() = 1.0;
}

std::uint64_t EffectiveOutdegreeSampler::operator()(Rng& rng) const {
    const double u = std::generate_canonical<double, 53>(rng);
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return support_[static_cast<std::size_t>(it - cumulative_.begin())];
}

std::vector<std::pair<std::uint64_t, double>> EffectiveOutdegreeSampler::law() const {
    std::vector<std::pair<std::uint64_t, double>> out;
    double prev = 0.0;
    for (std::size_t i = 0; i < support_.size(); ++i) {
        out.emplace_back(support_[i], cumulative_[i] - prev);
        prev = cumulative_[i];
    }
    return out;
}

double SamplePool::mean() const {
    if (values.empty()) return 0.0;
    long double s = 0.0L;
    for (double v : values) s += v;
    return static_cast<double>(s / static_cast<long double>(values.size()));
}

SamplePool initial_pool(const ModelSpec& spec) {
    spec.validate();
    return {std::vector<double>(spec.pool_size, 1.0), 0};
}

SamplePool iterate_pool(const SamplePool& prev, const ModelSpec& spec, unsigned threads,
                        std::vector<std::uint64_t>* indegrees) {
    spec.validate();
    if (prev.values.empty()) throw std::invalid_argument("cannot resample from an empty pool");

    const IndegreeSampler indegree(spec.alpha, spec.d);
    const EffectiveOutdegreeSampler outdegree(spec.outdeg_hist);
    const std::size_t m = spec.pool_size;
    const double constant = spec.constant_term();
    const std::uint64_t prev_size = prev.values.size();

    SamplePool next{std::vector<double>(m), prev.generation + 1};
    if (indegrees != nullptr) indegrees->assign(m, 0);

    const std::size_t blocks = (m + kPoolBlock - 1) / kPoolBlock;
    detail::for_each_block(blocks, threads, [&](std::size_t block) {
        Rng rng = make_stream(spec.seed, static_cast<std::uint64_t>(next.generation), block);
        std::uniform_int_distribution<std::uint64_t> pick(0, prev_size - 1);
        const std::size_t hi = std::min(m, (block + 1) * kPoolBlock);
        for (std::size_t i = block * kPoolBlock; i < hi; ++i) {
            const std::uint64_t n = indegree(rng);
            double sum = 0.0;
            for (std::uint64_t j = 0; j < n; ++j) {
                const auto dj = static_cast<double>(outdegree(rng));
                sum += prev.values[pick(rng)] / dj;
            }
            next.values[i] = spec.c * sum + constant;
            if (indegrees != nullptr) (*indegrees)[i] = n;
        }
    });
    return next;
}

SamplePool simulate_R(const ModelSpec& spec, int k, const SimulationOptions& options) {
    if (k < 0) throw std::invalid_argument("generation count must be non-negative");
    SamplePool pool = initial_pool(spec);
    for (int g = 0; g < k; ++g) pool = iterate_pool(pool, spec, options.threads);
    return pool;
}

std::vector<double> probe_points(std::span<const double> values, int count, double lower,
                                 double upper) {
    if (values.empty() || count < 1) throw std::invalid_argument("probe_points needs data");
    const auto sorted = sorted_copy(values);
    return probes_sorted(sorted, count, lower, upper);
}

std::vector<double> ccdf_at(std::span<const double> values, std::span<const double> probes) {
    const auto sorted = sorted_copy(values);
    return ccdf_sorted(sorted, probes);
}

FixedPointResult simulate_fixed_point(const ModelSpec& spec, const SimulationOptions& options) {
    FixedPointResult result;
    SamplePool prev = initial_pool(spec);
    std::vector<double> prev_sorted;
    double last_change = std::numeric_limits<double>::infinity();
    for (int g = 1; g <= options.max_generations; ++g) {
        SamplePool next = iterate_pool(prev, spec, options.threads);
        auto next_sorted = sorted_copy(next.values);
        if (g >= 2) {
            const auto probes = probes_sorted(prev_sorted, options.probe_count, 1e-3, 1e-1);
            const auto before = ccdf_sorted(prev_sorted, probes);
            const auto after = ccdf_sorted(next_sorted, probes);
            last_change = 0.0;
            for (std::size_t i = 0; i < probes.size(); ++i)
                last_change = std::max(last_change, std::abs(after[i] - before[i]));
            result.probe_changes.push_back(last_change);
            if (last_change < options.ccdf_tolerance) {
                result.pool = std::move(next);
                return result;
            }
        }
        prev = std::move(next);
        prev_sorted = std::move(next_sorted);
    }
    throw NonConvergence(options.max_generations, last_change);
}

double YLevelResult::abort_rate() const {
    return requested == 0 ? 0.0 : static_cast<double>(aborted) / static_cast<double>(requested);
}

std::vector<double> YLevelResult::level(int n) const {
    std::vector<double> out;
    out.reserve(levels.size());
    for (const auto& sample : levels) out.push_back(sample.at(static_cast<std::size_t>(n)));
    return out;
}

YLevelResult simulate_Y_levels(const ModelSpec& spec, int level, std::size_t samples,
                               std::uint64_t node_budget) {
    if (level < 0) throw std::invalid_argument("level must be non-negative");
    const IndegreeSampler indegree(spec.alpha, spec.d);
    const EffectiveOutdegreeSampler outdegree(spec.outdeg_hist);

    YLevelResult result;
    result.requested = samples;
    result.levels.reserve(samples);
    std::vector<double> current;
    std::vector<double> next;
    for (std::size_t s = 0; s < samples; ++s) {
        Rng rng = make_stream(spec.seed, kTreeStreamTag, s);
        std::vector<double> sums(static_cast<std::size_t>(level) + 1, 0.0);
        sums[0] = 1.0;
        current.assign(1, 1.0);
        std::uint64_t nodes = 1;
        bool aborted = false;
        for (int l = 1; l <= level && !aborted; ++l) {
            next.clear();
            double total = 0.0;
            for (double w : current) {
                const std::uint64_t kids = indegree(rng);
                nodes += kids;
                if (nodes > node_budget) {
                    aborted = true;
                    break;
                }
                for (std::uint64_t i = 0; i < kids; ++i) {
                    const double child = w / static_cast<double>(outdegree(rng));
                    total += child;
                    if (l < level) next.push_back(child);
                }
            }
            sums[static_cast<std::size_t>(l)] = total;
            current.swap(next);
        }
        if (aborted) {
            ++result.aborted;
            continue;
        }
        result.levels.push_back(std::move(sums));
    }
    return result;
}

std::vector<TailRatioRow> tail_ratio_table(std::span<const double> values, const ModelSpec& spec,
                                           double C, double lower, double upper, int probes) {
    if (values.empty() || probes < 1) throw std::invalid_argument("tail_ratio_table needs data");
    const auto sorted = sorted_copy(values);
    const IndegreeSampler indegree(spec.alpha, spec.d);
    std::vector<TailRatioRow> rows;
    const double step = probes == 1 ? 0.0 : std::log(lower / upper) / (probes - 1);
    for (int i = 0; i < probes; ++i) {
        const double target = upper * std::exp(step * i);
        TailRatioRow row;
        row.x = quantile_for_exceedance(sorted, target);
        const std::array<double, 1> at{row.x};
        row.empirical_ccdf = ccdf_sorted(sorted, at)[0];
        row.theory_ccdf = C * indegree.rate_ccdf(row.x);
        row.ratio = row.empirical_ccdf / row.theory_ccdf;
        rows.push_back(row);
    }
    return rows;
}

std::vector<BinnedMean> conditional_means(std::span<const std::uint64_t> indegrees,
                                          std::span<const double> ranks, std::size_t min_count) {
    if (indegrees.size() != ranks.size())
        throw std::invalid_argument("in-degree and rank samples differ in length");
    std::map<std::uint64_t, std::pair<long double, std::size_t>> groups;
    for (std::size_t i = 0; i < ranks.size(); ++i) {
        auto& [sum, count] = groups[indegrees[i]];
        sum += ranks[i];
        ++count;
    }
    std::vector<BinnedMean> bins;
    for (const auto& [n, acc] : groups) {
        if (acc.second < min_count) continue;
        bins.push_back({n, static_cast<double>(acc.first / static_cast<long double>(acc.second)),
                        acc.second});
    }
    return bins;
}

AffineFit fit_affine(std::span<const BinnedMean> bins) {
    if (bins.size() < 2) throw std::invalid_argument("affine fit needs at least two bins");
    double mx = 0.0;
    double my = 0.0;
    for (const auto& b : bins) {
        mx += static_cast<double>(b.indegree);
        my += b.mean;
    }
    const auto k = static_cast<double>(bins.size());
    mx /= k;
    my /= k;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (const auto& b : bins) {
        const double dx = static_cast<double>(b.indegree) - mx;
        const double dy = b.mean - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    AffineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    const double ss_res = syy - fit.slope * sxy;
    fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

}  // namespace prtail
