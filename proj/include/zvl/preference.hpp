#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "zvl/graph.hpp"

namespace zvl {

/// Anonymous ballot multiset. Canonical form is sorted by the graph's
/// construction order, so equal multisets compare equal.
class Profile {
public:
    Profile() = default;
    explicit Profile(std::vector<Vertex> ballots) : ballots_(std::move(ballots)) {
        std::sort(ballots_.begin(), ballots_.end());
    }

    const std::vector<Vertex>& ballots() const noexcept { return ballots_; }
    int size() const noexcept { return static_cast<int>(ballots_.size()); }
    bool empty() const noexcept { return ballots_.empty(); }

    bool operator==(const Profile&) const = default;

private:
    std::vector<Vertex> ballots_;
};

enum class Ordering { StrictlyPrefersA, Indifferent, StrictlyPrefersB };

/// Distance comparison of a and b from agent_loc's point of view.
Ordering prefers(const Graph& g, Vertex agent_loc, Vertex a, Vertex b);

/// True iff every ballot weakly prefers u over v and at least one strictly
/// prefers u. Throws EmptyProfile.
bool pareto_dominates(const Graph& g, const Profile& x, Vertex u, Vertex v);

/// { v | no u Pareto dominates v }, sorted by construction order. The empty
/// profile yields every vertex. Plain O(V^2 n) scan over ordered pairs; this
/// is the ground truth the mechanisms and the oracle lean on.
std::vector<Vertex> pareto_set(const Graph& g, const Profile& x);

} // namespace zvl
