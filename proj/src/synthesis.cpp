#include "prtail/synthesis.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace prtail {

namespace {

constexpr std::uint64_t kInStubStream = 1;
constexpr std::uint64_t kClassStream = 2;
constexpr std::uint64_t kWiringStream = 3;
constexpr std::uint64_t kSynthTag = 0x5359'4e54'4800'0000ULL;

}  // namespace

SynthSpec SynthSpec::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw SpecValidationError({"spec: expected a JSON object"});
    std::vector<std::string> problems;
    SynthSpec spec;
    if (j.contains("n") && j.at("n").is_number_unsigned())
        spec.n = j.at("n").get<std::size_t>();
    else
        problems.emplace_back("n: missing or not a positive integer");
    for (const auto& [key, target] : {std::pair{"alpha", &spec.alpha}, std::pair{"d", &spec.d}}) {
        if (j.contains(key) && j.at(key).is_number())
            *target = j.at(key).get<double>();
        else
            problems.emplace_back(std::string(key) + ": missing or not a number");
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
    return spec;
}

nlohmann::json SynthSpec::to_json() const {
    return {{"n", n}, {"alpha", alpha}, {"d", d}, {"outdeg_hist", outdeg_hist}, {"seed", seed}};
}

Graph wire_stubs(std::span<const std::uint64_t> in_degrees,
                 std::span<const std::uint64_t> out_capacity, Rng& rng,
                 std::uint64_t* self_loops_kept) {
    if (in_degrees.size() != out_capacity.size())
        throw std::invalid_argument("in-degree and out-capacity vectors differ in length");
    if (in_degrees.size() > std::numeric_limits<node_t>::max())
        throw std::invalid_argument("too many nodes");
    const auto n = static_cast<node_t>(in_degrees.size());

    // First-round stubs (one per node with capacity) come before the rest, so every node with
    // capacity gets at least one edge whenever there are enough in-stubs.
    std::vector<node_t> stubs;
    for (node_t v = 0; v < n; ++v)
        if (out_capacity[v] > 0) stubs.push_back(v);
    const std::size_t first_round = stubs.size();
    for (node_t v = 0; v < n; ++v)
        if (out_capacity[v] > 1) stubs.insert(stubs.end(), out_capacity[v] - 1, v);
    std::uint64_t total_in = 0;
    for (auto k : in_degrees) total_in += k;
    if (total_in > 0 && stubs.empty())
        throw std::invalid_argument("no out-capacity to attach " + std::to_string(total_in) +
                                    " in-stubs");

    const std::vector<node_t> full = stubs;
    // Draws come from stubs[lo, hi); a drawn stub is swapped to hi - 1 and hi shrinks.
    std::size_t lo = 0;
    std::size_t hi = first_round;
    bool second_round_open = false;
    std::vector<std::pair<node_t, node_t>> edges;
    edges.reserve(total_in);
    std::uint64_t loops = 0;

    for (node_t dst = 0; dst < n; ++dst) {
        for (std::uint64_t s = 0; s < in_degrees[dst]; ++s) {
            if (lo == hi && !second_round_open) {
                second_round_open = true;
                lo = first_round;
                hi = full.size();
            }
            if (lo == hi) {
                stubs = full;
                lo = 0;
                hi = full.size();
            }
            std::size_t pick = 0;
            for (int attempt = 0;; ++attempt) {
                pick = std::uniform_int_distribution<std::size_t>(lo, hi - 1)(rng);
                if (stubs[pick] != dst) break;
                if (attempt == kSelfLoopRedraws) {
                    ++loops;
                    break;
                }
            }
            edges.emplace_back(stubs[pick], dst);
            std::swap(stubs[pick], stubs[hi - 1]);
            --hi;
        }
    }
    if (self_loops_kept != nullptr) *self_loops_kept = loops;
    return Graph::from_edges(n, edges);
}

SynthResult generate(const SynthSpec& spec) {
    std::vector<std::string> problems;
    if (spec.n < 1000) problems.emplace_back("n: must be at least 1000");
    if (!(spec.alpha > 1.0)) problems.emplace_back("alpha: must exceed 1");
    if (!(spec.d > 0.0)) problems.emplace_back("d: must be positive");
    double total = 0.0;
    double first_moment = 0.0;
    for (std::size_t j = 0; j < spec.outdeg_hist.size(); ++j) {
        if (spec.outdeg_hist[j] < 0.0) problems.emplace_back("outdeg_hist: negative entry");
        total += spec.outdeg_hist[j];
        first_moment += static_cast<double>(j) * spec.outdeg_hist[j];
    }
    if (spec.outdeg_hist.empty() || std::abs(total - 1.0) > 1e-9)
        problems.emplace_back("outdeg_hist: entries must sum to 1");
    if (!problems.empty()) throw SpecValidationError(std::move(problems));

    SynthResult result;
    result.target_d = spec.d;
    if (std::abs(first_moment - spec.d) > 1e-6 * spec.d) {
        result.target_d = first_moment;
        std::ostringstream msg;
        msg << "out-degree histogram mean " << first_moment << " differs from d = " << spec.d
            << "; using the histogram mean as the in-degree target";
        result.warnings.push_back(msg.str());
    }
    if (!(result.target_d > 0.0))
        throw std::invalid_argument("out-degree histogram has all mass at 0; nothing can be wired");

    const IndegreeSampler indegree(spec.alpha, result.target_d);
    std::vector<std::uint64_t> in_degrees(spec.n);
    {
        Rng rng = make_stream(spec.seed, kSynthTag, kInStubStream);
        for (auto& k : in_degrees) k = indegree(rng);
    }

    std::vector<std::uint64_t> capacity(spec.n);
    {
        Rng rng = make_stream(spec.seed, kSynthTag, kClassStream);
        std::discrete_distribution<std::size_t> cls(spec.outdeg_hist.begin(), spec.outdeg_hist.end());
        for (auto& cap : capacity) cap = cls(rng);
    }

    Rng rng = make_stream(spec.seed, kSynthTag, kWiringStream);
    result.graph = wire_stubs(in_degrees, capacity, rng, &result.self_loops_kept);
    result.realized = degree_profile(result.graph);
    return result;
}

nlohmann::json sidecar_json(const SynthSpec& spec, const SynthResult& result) {
    return {{"spec", spec.to_json()},
            {"target_d", result.target_d},
            {"realized_profile", to_json(result.realized)},
            {"self_loops_kept", result.self_loops_kept},
            {"warnings", result.warnings}};
}

}  // namespace prtail
