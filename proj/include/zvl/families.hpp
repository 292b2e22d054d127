#pragma once

#include <optional>
#include <string>
#include <vector>

#include "zvl/graph.hpp"
#include "zvl/zv_partition.hpp"

namespace zvl {

/// A fixture: graph plus its canonical partition (absent for families that
/// have none, e.g. cycles beyond 4) and provenance describing where the
/// construction comes from.
struct AnnotatedGraph {
    Graph graph;
    std::optional<ZvOrderedPartition> partition;
    std::string family;     // name(params)
    std::string provenance; // construction notes
    Vertex anchor = -1;     // designated root/anchor where the family has one
};

/// Family name plus integer parameters:
///   clique L            biclique A B        discrete_line K
///   double_v_line K     grid2n N            family_F DEPTH ELL K
///   rooted_tree DEPTH BRANCHING             block_graph S1 S2 ...
///   cycle M             nonregular_example  weighted_counterexample
struct FamilySpec {
    std::string name;
    std::vector<int> params;
};

AnnotatedGraph generate(const FamilySpec& spec);

std::vector<std::string> family_names();

/// The manipulation-resistant total orders on the 5-cycle: three base orders
/// closed under the ten rotations and reflections, deduplicated, sorted.
/// Indices refer to generate({"cycle",{5}}).graph.
std::vector<std::vector<Vertex>> c5_orders();

struct RecognizeLimits {
    int max_vertices = 10;
    unsigned long long node_budget = 5'000'000ULL;
};

/// Exhaustive search for a partition certifying that g is a ZV-line graph.
/// Vertex-to-Z assignments, subgraph groupings, Z orders, and nested
/// structures are enumerated with incremental pruning. Definitive "none"
/// when the search space is exhausted; throws BudgetExceeded when the node
/// budget trips first, and InvalidParameters above the vertex bound.
std::optional<ZvOrderedPartition> recognize_zv_line(const Graph& g,
                                                    const RecognizeLimits& limits = {});

/// Number of canonical witnesses (subgraph sequences ordered by smallest
/// member). Guarded to graphs of at most 8 vertices.
unsigned long long count_zv_line_partitions(const Graph& g, const RecognizeLimits& limits = {});

} // namespace zvl
