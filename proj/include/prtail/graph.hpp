#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace prtail {

using node_t = std::uint32_t;
using edge_index_t = std::uint64_t;

/// Raised by the edge-list reader; carries the 1-based line number of the offending line
/// (0 when the problem is not tied to a line, e.g. empty input).
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& reason, const std::string& context = {});

    std::size_t line() const noexcept { return line_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    std::size_t line_;
    std::string reason_;
};

/**
 * Immutable directed multigraph stored by in-edges.
 *
 * Each node keeps the list of sources of its incoming edges (one entry per edge, so
 * repeated links and self-loops are all present) and each node knows its out-degree.
 * Node ids are dense 0..n-1; the original ids seen at load time are kept for reporting.
 */
class Graph {
public:
    Graph() = default;

    /// Builds from dense (source, destination) pairs. Ids must be < n.
    /// `original_ids` may be empty, in which case the dense id is its own original id.
    static Graph from_edges(node_t n, std::span<const std::pair<node_t, node_t>> edges,
                            std::vector<std::uint64_t> original_ids = {});

    node_t num_nodes() const noexcept { return n_; }
    edge_index_t num_edges() const noexcept { return in_sources_.size(); }

    std::span<const node_t> in_neighbors(node_t v) const {
        return {in_sources_.data() + in_offsets_[v], in_sources_.data() + in_offsets_[v + 1]};
    }
    std::size_t in_degree(node_t v) const { return in_offsets_[v + 1] - in_offsets_[v]; }
    std::uint64_t out_degree(node_t v) const { return out_deg_[v]; }
    bool is_dangling(node_t v) const { return out_deg_[v] == 0; }

    std::span<const std::uint64_t> out_degrees() const noexcept { return out_deg_; }
    std::uint64_t original_id(node_t v) const { return original_ids_[v]; }

private:
    node_t n_ = 0;
    std::vector<edge_index_t> in_offsets_{0};
    std::vector<node_t> in_sources_;
    std::vector<std::uint64_t> out_deg_;
    std::vector<std::uint64_t> original_ids_;
};

struct EdgeListOptions {
    bool drop_self_loops = false;
};

/// Reads "src dst" lines (tab or space separated, '#' comments, blank lines ignored).
/// Ids are remapped to dense indices in ascending order of the original id.
Graph load_edge_list(std::istream& in, const EdgeListOptions& options = {});

/// Opens `path` and reads it with load_edge_list; files ending in ".gz" are decompressed.
Graph load_edge_list_file(const std::filesystem::path& path, const EdgeListOptions& options = {});

/// Writes one "src\tdst" line per edge using the original ids.
void write_edge_list(const Graph& g, std::ostream& out);

/// Degree statistics consumed by the tail-coefficient formulas.
struct DegreeProfile {
    std::uint64_t n = 0;
    std::uint64_t m = 0;
    double d = 0.0;   ///< mean degree m / n
    double p0 = 0.0;  ///< fraction of dangling nodes
    std::map<std::uint64_t, double> p_hist;   ///< out-degree j -> fraction of nodes
    std::map<std::uint64_t, double> in_hist;  ///< in-degree k -> fraction of nodes
};

DegreeProfile degree_profile(const Graph& g);

/// {"n","m","d","p0","p_hist":{"0":..}}
nlohmann::json to_json(const DegreeProfile& profile);

/// Size-biased out-degree law of the source of a uniformly random edge: q_j = j p_j / d, j >= 1.
/// Throws std::invalid_argument when d == 0.
std::map<std::uint64_t, double> effective_outdegree_dist(const DegreeProfile& profile);

/// Out-degree histogram as a dense vector indexed by j, the form the theory and samplers use.
std::vector<double> dense_histogram(const std::map<std::uint64_t, double>& hist);

}  // namespace prtail
