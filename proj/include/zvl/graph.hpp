#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "zvl/error.hpp"

namespace zvl {

/// Vertex handle: index into the graph's construction order.
using Vertex = int;

/// Shortest-path length in graph-distance units (non-negative integer).
using Length = int;

struct EdgeSpec {
    std::string u;
    std::string v;
    int length = 1;
};

/// Finite undirected connected graph with positive-integer edge lengths.
///
/// Immutable after construction. The all-pairs distance table is computed
/// up front; distance queries are table reads, safe from concurrent workers.
/// Vertex indices follow the construction order, which is the tie-break
/// substrate used everywhere downstream.
class Graph {
public:
    Graph(std::vector<std::string> vertex_names, const std::vector<EdgeSpec>& edges);

    int vertex_count() const noexcept { return static_cast<int>(names_.size()); }

    const std::string& name(Vertex v) const { return names_.at(static_cast<size_t>(v)); }

    std::optional<Vertex> find(std::string_view name) const noexcept;

    /// Name -> index; throws UnknownVertex.
    Vertex vertex(std::string_view name) const;

    Length distance(Vertex u, Vertex v) const;

    /// Minimal distance from v to a non-empty vertex set; throws EmptySet.
    Length distance_to_set(Vertex v, std::span<const Vertex> s) const;

    /// { u | distance(v,u) <= d }, sorted by construction order.
    std::vector<Vertex> ball(Vertex v, Length d) const;

    /// Adjacency set N(v), sorted by construction order; never contains v.
    std::span<const Vertex> neighbors(Vertex v) const;

    /// Edges as index pairs (u < v) with lengths, in construction order.
    struct Edge {
        Vertex u;
        Vertex v;
        int length;
    };
    std::span<const Edge> edges() const noexcept { return edges_; }

    bool unit_lengths() const noexcept { return unit_lengths_; }

    Length diameter() const noexcept { return diameter_; }

    /// Induced subgraph on `members` (names preserved, ambient construction
    /// order kept). Throws Disconnected when the induced graph is not
    /// connected.
    Graph induced(std::span<const Vertex> members) const;

private:
    void check_vertex(Vertex v) const;
    void compute_distances();

    std::vector<std::string> names_;
    std::vector<Edge> edges_;
    std::vector<std::vector<Vertex>> adjacency_;
    std::vector<Length> dist_; // row-major vertex_count x vertex_count
    bool unit_lengths_ = true;
    Length diameter_ = 0;
};

} // namespace zvl
