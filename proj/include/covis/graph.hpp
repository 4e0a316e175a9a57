#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "covis/quantize.hpp"

namespace covis {

using VertexId = std::uint32_t;

/// Undirected weighted edge in canonical form: u < v under the packed-key
/// ordering, weight = number of distinct users who visited both endpoints.
struct WeightedEdge {
    LocationId u;
    LocationId v;
    std::uint32_t weight = 0;

    friend bool operator==(const WeightedEdge&, const WeightedEdge&) = default;
};

/// Immutable compact co-visitation graph. Vertices are millidegree cells,
/// stored sorted by packed key; adjacency is a CSR-style offset array with
/// parallel weights. Neighbor lists are sorted ascending and the structure
/// is symmetric (j in adj(i) iff i in adj(j), equal weights). No self-loops.
class CoVisGraph {
public:
    CoVisGraph() = default;

    /// Builds from a canonical edge stream: u < v, strictly sorted by
    /// (u, v), no duplicates, weight >= 1. Violations throw InternalError.
    static CoVisGraph from_edges(std::span<const WeightedEdge> edges);

    std::uint64_t vertex_count() const { return keys_.size(); }
    std::uint64_t edge_count() const { return m_; }

    LocationId location(VertexId i) const;
    std::optional<VertexId> find(LocationId id) const;

    std::uint32_t degree(VertexId i) const;  // throws std::out_of_range
    std::span<const VertexId> neighbors(VertexId i) const;
    std::span<const std::uint32_t> edge_weights(VertexId i) const;

    /// Visits every undirected edge once, in canonical order.
    template <typename Fn>  // void(VertexId u, VertexId v, uint32_t w)
    void for_each_edge(Fn&& fn) const {
        for (VertexId u = 0; u < keys_.size(); ++u) {
            for (std::uint64_t e = offsets_[u]; e < offsets_[u + 1]; ++e) {
                if (neighbors_[e] > u) {
                    fn(u, neighbors_[e], weights_[e]);
                }
            }
        }
    }

    friend bool operator==(const CoVisGraph&, const CoVisGraph&) = default;

private:
    friend void save_snapshot(const CoVisGraph&, const std::filesystem::path&);
    friend CoVisGraph load_snapshot(const std::filesystem::path&);

    void check_index(VertexId i) const;

    std::vector<std::uint64_t> keys_;        // packed LocationIds, ascending
    std::vector<std::uint64_t> offsets_{0};  // size N+1 (empty graph: {0})
    std::vector<VertexId> neighbors_;     // size 2M
    std::vector<std::uint32_t> weights_;  // size 2M
    std::uint64_t m_ = 0;
};

struct ComponentReport {
    std::uint64_t component_count = 0;
    std::vector<std::uint64_t> sizes;  // descending
    std::uint64_t giant_size = 0;
    double giant_fraction = 0.0;  // 0 for the empty graph
};

ComponentReport components(const CoVisGraph& g);

/// Binary snapshot, versioned; layout documented in the README. Loading a
/// file with a bad magic/version or truncated payload throws IoError.
void save_snapshot(const CoVisGraph& g, const std::filesystem::path& path);
CoVisGraph load_snapshot(const std::filesystem::path& path);

}  // namespace covis
