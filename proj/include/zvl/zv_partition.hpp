#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zvl/graph.hpp"

namespace zvl {

struct ZvOrderedPartition;

/// One V_i: its members plus, for non-singleton subgraphs, the partition of
/// the induced graph. Nested partitions use ambient vertex indices and may
/// refer only to `members`.
struct SubgraphSpec {
    std::vector<Vertex> members;
    std::optional<ZvOrderedPartition> nested;
};

/// The sequence Z, V_1..V_k. Position in z_order is the left-to-right order.
struct ZvOrderedPartition {
    std::vector<Vertex> z_order;
    std::vector<SubgraphSpec> subgraphs;
};

struct ValidationFailure {
    // "D2.1".."D2.5", "D4.a".."D4.e", or "UnitLengthsRequired"
    std::string condition;
    std::vector<Vertex> witnesses;
    std::string message;
};

struct ValidationReport {
    bool valid = true;
    std::vector<ValidationFailure> failures;

    void fail(std::string condition, std::vector<Vertex> witnesses, std::string message) {
        valid = false;
        failures.push_back({std::move(condition), std::move(witnesses), std::move(message)});
    }
};

/// Checks the five conditions of a ZV-ordered partition:
///   D2.1 sets non-empty, duplicate-free, V_i pairwise disjoint
///   D2.2 the sequence covers the vertex set and every element owns a
///        vertex covered by no other element (so no sub-sequence is a cover)
///   D2.3 each V_i has a unique vertex closest to Z, at distance <= 1
///   D2.4 deleting the root separates V_i \ {root} from the rest, and
///        deleting Z separates V_i \ Z from the rest minus Z
///   D2.5 z_order is duplicate-free
/// Throws UnknownVertex when a listed vertex is not in g.
ValidationReport validate_partition(const Graph& g, const ZvOrderedPartition& p);

/// The unique argmin of distance-to-Z within V_i. Throws AmbiguousRoot when
/// D2.3 does not hold, InvalidParameters for a bad index.
Vertex root_of(const Graph& g, const ZvOrderedPartition& p, int i);

/// True iff the positions of s in z_order form a contiguous range (the empty
/// set counts). Throws NotSubsetOfZ when s has a vertex outside Z.
bool is_interval(const ZvOrderedPartition& p, std::span<const Vertex> s);

/// Recursive ZV-line-graph check:
///   D4.a the partition validates (D2 failures are reported as-is)
///   D4.b for every z in Z, ball(z,1) intersected with Z is an interval
///   D4.c each induced subgraph is recursively a ZV-line graph
///   D4.d the root of V_i is the leftmost Z-vertex of its nested partition
///   D4.e ball(root,1) intersected with Z is an interval
/// plus a UnitLengthsRequired failure when any edge length differs from 1.
/// Throws MissingNestedPartition for a multi-vertex V_i without a nested
/// partition.
ValidationReport validate_zv_line(const Graph& g, const ZvOrderedPartition& p);

/// Executable form of the interval lemma: for every vertex v and every
/// radius d up to the diameter, ball(v,d) intersected with Z must be an
/// interval. Reports the first violation.
ValidationReport ball_interval_check(const Graph& g, const ZvOrderedPartition& p);

} // namespace zvl
