#include "prtail/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

#include <zlib.h>

namespace prtail {

namespace {

std::string parse_message(std::size_t line, const std::string& reason, const std::string& context) {
    std::string msg = context.empty() ? std::string{} : context + ": ";
    if (line > 0) msg += "line " + std::to_string(line) + ": ";
    return msg + reason;
}

}  // namespace

ParseError::ParseError(std::size_t line, const std::string& reason, const std::string& context)
    : std::runtime_error(parse_message(line, reason, context)), line_(line), reason_(reason) {}

Graph Graph::from_edges(node_t n, std::span<const std::pair<node_t, node_t>> edges,
                        std::vector<std::uint64_t> original_ids) {
    Graph g;
    g.n_ = n;
    g.in_offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
    g.out_deg_.assign(n, 0);
    for (const auto& [src, dst] : edges) {
        if (src >= n || dst >= n)
            throw std::invalid_argument("edge endpoint out of range");
        ++g.in_offsets_[dst + 1];
        ++g.out_deg_[src];
    }
    for (node_t v = 0; v < n; ++v) g.in_offsets_[v + 1] += g.in_offsets_[v];

    // Stable placement keeps each in-list in input order.
    g.in_sources_.resize(edges.size());
    std::vector<edge_index_t> cursor(g.in_offsets_.begin(), g.in_offsets_.end() - 1);
    for (const auto& [src, dst] : edges) g.in_sources_[cursor[dst]++] = src;

    if (original_ids.empty()) {
        original_ids.resize(n);
        for (node_t v = 0; v < n; ++v) original_ids[v] = v;
    } else if (original_ids.size() != n) {
        throw std::invalid_argument("original id table size differs from node count");
    }
    g.original_ids_ = std::move(original_ids);
    return g;
}

namespace {

bool parse_id(std::string_view token, std::uint64_t& out) {
    const auto* first = token.data();
    const auto* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

class EdgeAccumulator {
public:
    explicit EdgeAccumulator(const EdgeListOptions& options) : options_(options) {}

    void consume_line(std::string_view line) {
        ++line_no_;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

        std::string_view tokens[3];
        std::size_t count = 0;
        std::size_t pos = 0;
        while (pos < line.size()) {
            while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
            if (pos >= line.size()) break;
            if (count == 0 && line[pos] == '#') return;
            std::size_t end = pos;
            while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
            if (count == 3) break;
            tokens[count++] = line.substr(pos, end - pos);
            pos = end;
        }
        if (count == 0) return;
        if (count != 2)
            throw ParseError(line_no_, "expected two node ids, found " + std::to_string(count) +
                                           (count > 2 ? "+" : "") + " tokens");
        std::uint64_t src = 0;
        std::uint64_t dst = 0;
        if (!parse_id(tokens[0], src))
            throw ParseError(line_no_, "invalid node id '" + std::string(tokens[0]) + "'");
        if (!parse_id(tokens[1], dst))
            throw ParseError(line_no_, "invalid node id '" + std::string(tokens[1]) + "'");
        ++edges_read_;
        if (options_.drop_self_loops && src == dst) return;
        raw_.emplace_back(src, dst);
    }

    Graph finish() {
        if (edges_read_ == 0) throw ParseError(0, "edge list contains no edges");

        std::vector<std::uint64_t> ids;
        ids.reserve(raw_.size() * 2);
        for (const auto& [s, t] : raw_) {
            ids.push_back(s);
            ids.push_back(t);
        }
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        if (ids.size() > std::numeric_limits<node_t>::max())
            throw ParseError(0, "too many distinct node ids");

        auto dense = [&ids](std::uint64_t id) {
            return static_cast<node_t>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
        };
        std::vector<std::pair<node_t, node_t>> edges;
        edges.reserve(raw_.size());
        for (const auto& [s, t] : raw_) edges.emplace_back(dense(s), dense(t));
        raw_.clear();
        raw_.shrink_to_fit();
        const auto n = static_cast<node_t>(ids.size());
        return Graph::from_edges(n, edges, std::move(ids));
    }

private:
    EdgeListOptions options_;
    std::size_t line_no_ = 0;
    std::size_t edges_read_ = 0;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> raw_;
};

bool has_gz_suffix(const std::filesystem::path& path) {
    return path.extension() == ".gz";
}

Graph load_gzip(const std::filesystem::path& path, const EdgeListOptions& options) {
    gzFile file = gzopen(path.c_str(), "rb");
    if (file == nullptr) throw std::runtime_error("cannot open " + path.string());
    EdgeAccumulator acc(options);
    std::string pending;
    char buffer[1 << 16];
    int got = 0;
    try {
        while ((got = gzread(file, buffer, sizeof buffer)) > 0) {
            std::string_view chunk(buffer, static_cast<std::size_t>(got));
            std::size_t start = 0;
            for (std::size_t nl; (nl = chunk.find('\n', start)) != std::string_view::npos;) {
                pending.append(chunk.substr(start, nl - start));
                acc.consume_line(pending);
                pending.clear();
                start = nl + 1;
            }
            pending.append(chunk.substr(start));
        }
        if (got < 0) {
            int errnum = 0;
            throw std::runtime_error(path.string() + ": " + gzerror(file, &errnum));
        }
        if (!pending.empty()) acc.consume_line(pending);
    } catch (...) {
        gzclose(file);
        throw;
    }
    gzclose(file);
    return acc.finish();
}

}  // namespace

Graph load_edge_list(std::istream& in, const EdgeListOptions& options) {
    EdgeAccumulator acc(options);
    std::string line;
    while (std::getline(in, line)) acc.consume_line(line);
    return acc.finish();
}

Graph load_edge_list_file(const std::filesystem::path& path, const EdgeListOptions& options) {
    if (!std::filesystem::exists(path)) throw std::runtime_error(path.string() + ": no such file");
    if (has_gz_suffix(path)) {
        try {
            return load_gzip(path, options);
        } catch (const ParseError& e) {
            throw ParseError(e.line(), e.reason(), path.string());
        }
    }
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    try {
        return load_edge_list(in, options);
    } catch (const ParseError& e) {
        throw ParseError(e.line(), e.reason(), path.string());
    }
}

void write_edge_list(const Graph& g, std::ostream& out) {
    for (node_t v = 0; v < g.num_nodes(); ++v) {
        for (node_t u : g.in_neighbors(v))
            out << g.original_id(u) << '\t' << g.original_id(v) << '\n';
    }
}

DegreeProfile degree_profile(const Graph& g) {
    DegreeProfile p;
    p.n = g.num_nodes();
    p.m = g.num_edges();
    if (p.n == 0) return p;
    p.d = static_cast<double>(p.m) / static_cast<double>(p.n);

    std::map<std::uint64_t, std::uint64_t> out_counts;
    std::map<std::uint64_t, std::uint64_t> in_counts;
    for (node_t v = 0; v < g.num_nodes(); ++v) {
        ++out_counts[g.out_degree(v)];
        ++in_counts[g.in_degree(v)];
    }
    const auto n = static_cast<double>(p.n);
    for (const auto& [j, count] : out_counts) p.p_hist[j] = static_cast<double>(count) / n;
    for (const auto& [k, count] : in_counts) p.in_hist[k] = static_cast<double>(count) / n;
    p.p0 = p.p_hist.contains(0) ? p.p_hist.at(0) : 0.0;
    return p;
}

nlohmann::json to_json(const DegreeProfile& profile) {
    nlohmann::json hist = nlohmann::json::object();
    for (const auto& [j, pj] : profile.p_hist) hist[std::to_string(j)] = pj;
    return {{"n", profile.n}, {"m", profile.m}, {"d", profile.d}, {"p0", profile.p0},
            {"p_hist", std::move(hist)}};
}

std::map<std::uint64_t, double> effective_outdegree_dist(const DegreeProfile& profile) {
    // Normalize by the histogram's own first moment; equals d for graph-derived profiles.
    double mass = 0.0;
    for (const auto& [j, pj] : profile.p_hist) mass += static_cast<double>(j) * pj;
    if (profile.d <= 0.0 || mass <= 0.0)
        throw std::invalid_argument("effective out-degree undefined for an edgeless graph");
    std::map<std::uint64_t, double> q;
    for (const auto& [j, pj] : profile.p_hist) {
        if (j == 0 || pj == 0.0) continue;
        q[j] = static_cast<double>(j) * pj / mass;
    }
    return q;
}

std::vector<double> dense_histogram(const std::map<std::uint64_t, double>& hist) {
    if (hist.empty()) return {};
    std::vector<double> dense(hist.rbegin()->first + 1, 0.0);
    for (const auto& [j, pj] : hist) dense[j] = pj;
    return dense;
}

}  // namespace prtail
