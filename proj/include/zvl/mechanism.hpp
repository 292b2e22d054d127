#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zvl/preference.hpp"
#include "zvl/zv_partition.hpp"

namespace zvl {

struct TraceStep {
    enum class Branch { EmptyProfile, Recurse, LeftmostParetoZ, SingletonLeaf };

    int depth = 0;
    std::string context; // "" at the top level, "V_2>V_1" inside
    Branch branch = Branch::LeftmostParetoZ;
    std::vector<Vertex> pareto_z; // PO cap Z consulted, ambient indices
    int subgraph = -1;            // recursion target for Branch::Recurse
};

/// A mechanism outcome. Traces make audit counterexamples explainable;
/// outcome equality ignores them.
struct Outcome {
    Vertex vertex = -1;
    std::vector<TraceStep> trace;
    // False when F* was executed on a partition that is valid per the
    // ordered-partition conditions but fails the ZV-line conditions.
    bool zv_line_partition = true;
};

/// Bound evaluator for the recursive leftmost-Pareto-optimal-Z mechanism.
/// The partition tree, induced subgraphs, and roots are resolved once at
/// construction; evaluation is pure and safe for parallel audit workers.
class FStar {
public:
    FStar(const Graph& g, const ZvOrderedPartition& p, bool allow_weighted = false);
    FStar(FStar&&) noexcept;
    FStar& operator=(FStar&&) noexcept;
    ~FStar();

    Outcome run(const Profile& x) const;

    /// Equivalent predefined order: Z left to right, then each subgraph's
    /// recursively induced order, skipping vertices already placed.
    std::vector<Vertex> induced_order() const;

    bool zv_line_valid() const noexcept { return zv_line_valid_; }
    const ZvOrderedPartition& partition() const noexcept { return partition_; }

    struct SaturationFailure {
        std::string subgraph;
        int tau = 0;
        Vertex expected_root = -1;
        Vertex got = -1;
    };
    /// Lemma-style saturation probe: for every nested subgraph, the profile
    /// voting each member location tau times must yield the subgraph's root
    /// under the subgraph's own mechanism.
    std::vector<SaturationFailure> root_saturation_failures(std::span<const int> tau_list) const;

private:
    struct Level;
    const Graph* graph_;
    ZvOrderedPartition partition_;
    std::unique_ptr<Level> top_;
    bool zv_line_valid_ = true;
};

enum class MechanismKind { FStar, Order, LcaTree, BlockGraph, Median, Mean, Fixed, Dictator };

/// Parameter block for a named mechanism. Orders are total and
/// duplicate-free over the ambient graph's vertices; empty orders fall back
/// to the documented defaults.
struct MechanismRef {
    MechanismKind kind = MechanismKind::FStar;
    std::vector<Vertex> order; // Order; BlockGraph ties; Median/Mean tiebreak
    Vertex anchor = -1;        // LcaTree root; BlockGraph anchor; Fixed location
    int agent = 1;             // Dictator, 1-based
};

/// Bound, immutable mechanism evaluator.
class Mechanism {
public:
    Mechanism(const Graph& g, MechanismRef ref, const ZvOrderedPartition* partition = nullptr,
              bool allow_weighted = false);

    /// Evaluate on a ballot multiset. For the dictator this evaluates on the
    /// canonical sorted sequence; audits of the dictator use run_sequence.
    Outcome run(const Profile& x) const;

    /// Evaluate on an ordered ballot list (identity = position).
    Outcome run_sequence(std::span<const Vertex> ballots) const;

    bool anonymous() const noexcept { return ref_.kind != MechanismKind::Dictator; }
    MechanismKind kind() const noexcept { return ref_.kind; }
    const Graph& graph() const noexcept { return *graph_; }
    const FStar* fstar() const noexcept { return fstar_ ? &*fstar_ : nullptr; }

private:
    const Graph* graph_;
    MechanismRef ref_;
    std::optional<FStar> fstar_;
    std::vector<Vertex> tiebreak_; // resolved total order for Median/Mean/BlockGraph
};

// Free-function forms used by tests and the CLI.

Outcome f_star(const Graph& g, const ZvOrderedPartition& p, const Profile& x,
               bool allow_weighted = false);

std::vector<Vertex> induced_global_order(const Graph& g, const ZvOrderedPartition& p);

/// First element of `order` that is Pareto optimal for x.
Outcome order_mechanism(const Graph& g, std::span<const Vertex> order, const Profile& x);

/// Deepest vertex that is an ancestor (w.r.t. root) of every ballot.
/// Throws NotATree / EmptyProfile.
Outcome lca_tree_mechanism(const Graph& g, Vertex root, const Profile& x);

/// Pareto optimal location closest to `anchor`, ties by `order` (empty =
/// construction order). Throws NotABlockGraph when some biconnected
/// component is not a clique.
Outcome block_graph_mechanism(const Graph& g, Vertex anchor, std::span<const Vertex> order,
                              const Profile& x);

struct BlockCutTree {
    std::vector<std::vector<Vertex>> blocks; // maximal biconnected components
    std::vector<Vertex> cut_vertices;        // articulation points, sorted
    // Tree edges between block index and index into cut_vertices.
    std::vector<std::pair<int, int>> edges;
};
BlockCutTree block_cut_tree(const Graph& g);
bool is_block_graph(const Graph& g);

/// argmin of the sum of distances to the ballots, ties by `tiebreak`
/// (empty = construction order). Throws EmptyProfile.
Outcome median_mechanism(const Graph& g, std::span<const Vertex> tiebreak, const Profile& x);

/// As median, with squared distances.
Outcome mean_mechanism(const Graph& g, std::span<const Vertex> tiebreak, const Profile& x);

Outcome fixed_mechanism(const Graph& g, Vertex location, const Profile& x);

/// Location reported by the `agent`-th ballot (1-based). Ordered input;
/// throws EmptyProfile when the ballot is missing.
Outcome dictator_mechanism(const Graph& g, int agent, std::span<const Vertex> ballots);

/// First-stage component choice for graphs whose connected components are
/// handled by separate mechanisms: pick the first component (in the given
/// order) holding at least one ballot, then run its mechanism on the ballots
/// restricted to it. Ballots and the result travel by name because each
/// component graph has its own index space.
struct ComponentMechanism {
    const Graph* graph;
    const Mechanism* mechanism;
};
std::string disconnected_wrapper(std::span<const ComponentMechanism> components,
                                 std::span<const std::string> ballots);

} // namespace zvl
