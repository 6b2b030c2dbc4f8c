#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "prtail/graph.hpp"
#include "prtail/simulator.hpp"

namespace prtail {

struct SynthSpec {
    std::size_t n = 1'000'000;
    double alpha = 1.1;
    double d = 8.0;
    std::vector<double> outdeg_hist;  ///< entry j holds the target fraction of nodes with out-degree j
    std::uint64_t seed = 1;

    static SynthSpec from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

struct SynthResult {
    Graph graph;
    DegreeProfile realized;
    std::vector<std::string> warnings;
    std::uint64_t self_loops_kept = 0;  ///< self-loops accepted after exhausting redraws
    double target_d = 0.0;              ///< in-degree mean actually used
};

inline constexpr int kSelfLoopRedraws = 100;

/**
 * Connects in-stubs to out-stubs. Node v receives `in_degrees[v]` edges and offers
 * `out_capacity[v]` out-stubs. The first in-stubs take one stub from every node with capacity,
 * in random order; later in-stubs take a uniformly random stub from the remaining ones, so
 * sources are chosen with probability proportional to remaining capacity. When the stubs run out
 * a fresh copy of the full stub set is opened. A draw that would close a self-loop is repeated up
 * to 100 times before being accepted.
 */
Graph wire_stubs(std::span<const std::uint64_t> in_degrees,
                 std::span<const std::uint64_t> out_capacity, Rng& rng,
                 std::uint64_t* self_loops_kept = nullptr);

/// In-degrees i.i.d. mixed Poisson N(T), out-degree classes multinomial from the histogram,
/// then wire_stubs. Single-threaded and fully determined by the seed.
SynthResult generate(const SynthSpec& spec);

/// JSON sidecar: the spec and the realized degree profile.
nlohmann::json sidecar_json(const SynthSpec& spec, const SynthResult& result);

}  // namespace prtail
