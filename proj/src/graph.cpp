#include "zvl/graph.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <unordered_map>
#include <unordered_set>

namespace zvl {

const char* errc_name(Errc c) {
    switch (c) {
    case Errc::DuplicateVertex: return "DuplicateVertex";
    case Errc::UnknownEndpoint: return "UnknownEndpoint";
    case Errc::SelfLoop: return "SelfLoop";
    case Errc::NonPositiveLength: return "NonPositiveLength";
    case Errc::DuplicateEdge: return "DuplicateEdge";
    case Errc::Disconnected: return "Disconnected";
    case Errc::UnknownVertex: return "UnknownVertex";
    case Errc::EmptySet: return "EmptySet";
    case Errc::EmptyProfile: return "EmptyProfile";
    case Errc::NotSubsetOfZ: return "NotSubsetOfZ";
    case Errc::AmbiguousRoot: return "AmbiguousRoot";
    case Errc::MissingNestedPartition: return "MissingNestedPartition";
    case Errc::ParetoZEmpty: return "ParetoZEmpty";
    case Errc::WeightedWithoutOverride: return "WeightedWithoutOverride";
    case Errc::NotATree: return "NotATree";
    case Errc::NotABlockGraph: return "NotABlockGraph";
    case Errc::InvalidOrder: return "InvalidOrder";
    case Errc::InvalidParameters: return "InvalidParameters";
    case Errc::SearchSpaceTooLarge: return "SearchSpaceTooLarge";
    case Errc::BudgetExceeded: return "BudgetExceeded";
    case Errc::UnknownBallot: return "UnknownBallot";
    case Errc::ParseError: return "ParseError";
    }
    return "UnknownError";
}

Graph::Graph(std::vector<std::string> vertex_names, const std::vector<EdgeSpec>& edges)
    : names_(std::move(vertex_names)) {
    std::unordered_map<std::string_view, Vertex> index;
    index.reserve(names_.size());
    for (size_t i = 0; i < names_.size(); ++i) {
        auto [it, inserted] = index.emplace(names_[i], static_cast<Vertex>(i));
        if (!inserted)
            throw Error(Errc::DuplicateVertex, "vertex '" + names_[i] + "' listed twice");
    }

    adjacency_.resize(names_.size());
    std::unordered_set<long long> seen;
    for (const EdgeSpec& e : edges) {
        auto ui = index.find(e.u);
        auto vi = index.find(e.v);
        if (ui == index.end())
            throw Error(Errc::UnknownEndpoint, "edge endpoint '" + e.u + "' is not a vertex");
        if (vi == index.end())
            throw Error(Errc::UnknownEndpoint, "edge endpoint '" + e.v + "' is not a vertex");
        if (ui->second == vi->second)
            throw Error(Errc::SelfLoop, "self-loop at '" + e.u + "'");
        if (e.length < 1)
            throw Error(Errc::NonPositiveLength,
                        "edge " + e.u + "-" + e.v + " has length " + std::to_string(e.length));
        Vertex a = std::min(ui->second, vi->second);
        Vertex b = std::max(ui->second, vi->second);
        long long key = static_cast<long long>(a) * static_cast<long long>(names_.size()) + b;
        if (!seen.insert(key).second)
            throw Error(Errc::DuplicateEdge, "edge " + e.u + "-" + e.v + " listed twice");
        edges_.push_back({a, b, e.length});
        adjacency_[static_cast<size_t>(a)].push_back(b);
        adjacency_[static_cast<size_t>(b)].push_back(a);
        if (e.length != 1)
            unit_lengths_ = false;
    }
    for (auto& adj : adjacency_)
        std::sort(adj.begin(), adj.end());

    if (names_.empty())
        throw Error(Errc::InvalidParameters, "graph needs at least one vertex");

    compute_distances();
}

void Graph::compute_distances() {
    const int n = vertex_count();
    constexpr Length kInf = std::numeric_limits<Length>::max();
    dist_.assign(static_cast<size_t>(n) * static_cast<size_t>(n), kInf);

    // Per-edge lengths keyed by adjacency; the table is small, so Dijkstra
    // from every source with a binary heap is plenty.
    std::vector<std::vector<std::pair<Vertex, int>>> weighted(static_cast<size_t>(n));
    for (const Edge& e : edges_) {
        weighted[static_cast<size_t>(e.u)].emplace_back(e.v, e.length);
        weighted[static_cast<size_t>(e.v)].emplace_back(e.u, e.length);
    }

    for (Vertex s = 0; s < n; ++s) {
        Length* row = &dist_[static_cast<size_t>(s) * static_cast<size_t>(n)];
        using Item = std::pair<Length, Vertex>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        row[s] = 0;
        heap.emplace(0, s);
        while (!heap.empty()) {
            auto [d, v] = heap.top();
            heap.pop();
            if (d > row[v])
                continue;
            for (auto [u, len] : weighted[static_cast<size_t>(v)]) {
                Length nd = d + len;
                if (nd < row[u]) {
                    row[u] = nd;
                    heap.emplace(nd, u);
                }
            }
        }
    }

    for (Vertex v = 0; v < n; ++v) {
        if (dist_[static_cast<size_t>(v)] == kInf)
            throw Error(Errc::Disconnected, "vertex '" + names_[static_cast<size_t>(v)] +
                                                "' is unreachable from '" + names_[0] + "'");
    }
    diameter_ = *std::max_element(dist_.begin(), dist_.end());
}

std::optional<Vertex> Graph::find(std::string_view name) const noexcept {
    for (size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name)
            return static_cast<Vertex>(i);
    return std::nullopt;
}

Vertex Graph::vertex(std::string_view name) const {
    if (auto v = find(name))
        return *v;
    throw Error(Errc::UnknownVertex, "no vertex named '" + std::string(name) + "'");
}

void Graph::check_vertex(Vertex v) const {
    if (v < 0 || v >= vertex_count())
        throw Error(Errc::UnknownVertex, "vertex index " + std::to_string(v) + " out of range");
}

Length Graph::distance(Vertex u, Vertex v) const {
    check_vertex(u);
    check_vertex(v);
    return dist_[static_cast<size_t>(u) * static_cast<size_t>(vertex_count()) +
                 static_cast<size_t>(v)];
}

Length Graph::distance_to_set(Vertex v, std::span<const Vertex> s) const {
    if (s.empty())
        throw Error(Errc::EmptySet, "distance_to_set over an empty set");
    Length best = std::numeric_limits<Length>::max();
    for (Vertex u : s)
        best = std::min(best, distance(v, u));
    return best;
}

std::vector<Vertex> Graph::ball(Vertex v, Length d) const {
    check_vertex(v);
    std::vector<Vertex> out;
    for (Vertex u = 0; u < vertex_count(); ++u)
        if (distance(v, u) <= d)
            out.push_back(u);
    return out;
}

std::span<const Vertex> Graph::neighbors(Vertex v) const {
    check_vertex(v);
    return adjacency_[static_cast<size_t>(v)];
}

Graph Graph::induced(std::span<const Vertex> members) const {
    std::vector<Vertex> sorted(members.begin(), members.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    std::vector<std::string> sub_names;
    sub_names.reserve(sorted.size());
    std::vector<char> keep(static_cast<size_t>(vertex_count()), 0);
    for (Vertex v : sorted) {
        check_vertex(v);
        keep[static_cast<size_t>(v)] = 1;
        sub_names.push_back(name(v));
    }
    std::vector<EdgeSpec> sub_edges;
    for (const Edge& e : edges_)
        if (keep[static_cast<size_t>(e.u)] && keep[static_cast<size_t>(e.v)])
            sub_edges.push_back({name(e.u), name(e.v), e.length});
    return Graph(std::move(sub_names), sub_edges);
}

} // namespace zvl
