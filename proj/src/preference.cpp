#include "zvl/preference.hpp"

namespace zvl {

Ordering prefers(const Graph& g, Vertex agent_loc, Vertex a, Vertex b) {
    Length da = g.distance(agent_loc, a);
    Length db = g.distance(agent_loc, b);
    if (da < db)
        return Ordering::StrictlyPrefersA;
    if (db < da)
        return Ordering::StrictlyPrefersB;
    return Ordering::Indifferent;
}

bool pareto_dominates(const Graph& g, const Profile& x, Vertex u, Vertex v) {
    if (x.empty())
        throw Error(Errc::EmptyProfile, "Pareto dominance needs at least one ballot");
    bool strict = false;
    for (Vertex ballot : x.ballots()) {
        Length du = g.distance(ballot, u);
        Length dv = g.distance(ballot, v);
        if (du > dv)
            return false;
        if (du < dv)
            strict = true;
    }
    return strict;
}

std::vector<Vertex> pareto_set(const Graph& g, const Profile& x) {
    std::vector<Vertex> out;
    const int n = g.vertex_count();
    if (x.empty()) {
        out.resize(static_cast<size_t>(n));
        for (Vertex v = 0; v < n; ++v)
            out[static_cast<size_t>(v)] = v;
        return out;
    }
    for (Vertex v = 0; v < n; ++v) {
        bool dominated = false;
        for (Vertex u = 0; u < n && !dominated; ++u)
            if (u != v && pareto_dominates(g, x, u, v))
                dominated = true;
        if (!dominated)
            out.push_back(v);
    }
    return out;
}

} // namespace zvl
