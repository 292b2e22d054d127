#include "zvl/mechanism.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <unordered_map>

namespace zvl {

namespace {

void require_total_order(const Graph& g, std::span<const Vertex> order, const char* what) {
    if (static_cast<int>(order.size()) != g.vertex_count())
        throw Error(Errc::InvalidOrder, std::string(what) + " must list every vertex exactly once");
    std::vector<char> seen(static_cast<size_t>(g.vertex_count()), 0);
    for (Vertex v : order) {
        if (v < 0 || v >= g.vertex_count())
            throw Error(Errc::UnknownVertex, std::string(what) + " references an unknown vertex");
        if (seen[static_cast<size_t>(v)]++)
            throw Error(Errc::InvalidOrder,
                        std::string(what) + " lists '" + g.name(v) + "' twice");
    }
}

std::vector<Vertex> construction_order(const Graph& g) {
    std::vector<Vertex> order(static_cast<size_t>(g.vertex_count()));
    for (Vertex v = 0; v < g.vertex_count(); ++v)
        order[static_cast<size_t>(v)] = v;
    return order;
}

Outcome argmin_cost(const Graph& g, std::span<const Vertex> tiebreak, const Profile& x,
                    const std::function<long long(Vertex)>& cost) {
    if (x.empty())
        throw Error(Errc::EmptyProfile, "this mechanism needs at least one ballot");
    std::vector<Vertex> order =
        tiebreak.empty() ? construction_order(g) : std::vector<Vertex>(tiebreak.begin(), tiebreak.end());
    if (!tiebreak.empty())
        require_total_order(g, order, "tie-break order");
    Vertex best = -1;
    long long best_cost = std::numeric_limits<long long>::max();
    for (Vertex v : order) {
        long long c = cost(v);
        if (c < best_cost) {
            best_cost = c;
            best = v;
        }
    }
    Outcome out;
    out.vertex = best;
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// F*

struct FStar::Level {
    const Graph* graph = nullptr; // ambient graph at the top, owned otherwise
    std::optional<Graph> owned;
    std::vector<Vertex> to_ambient; // sorted ascending (induced keeps order)
    std::vector<int> subgraph_of;   // level vertex -> subgraph index or -1
    std::vector<Vertex> z_order;    // level indices

    struct Sub {
        std::vector<Vertex> members; // level indices
        Vertex root = -1;            // level index
        std::string label;
        std::unique_ptr<Level> nested; // null for a singleton leaf
    };
    std::vector<Sub> subs;

    Vertex ambient(Vertex level_v) const { return to_ambient[static_cast<size_t>(level_v)]; }
};

namespace {

std::unique_ptr<FStar::Level> build_level(const Graph& level_graph, const Graph* keep_alive,
                                          std::vector<Vertex> to_ambient,
                                          const ZvOrderedPartition& p, const std::string& context) {
    ValidationReport base = validate_partition(level_graph, p);
    if (!base.valid)
        throw Error(Errc::InvalidParameters,
                    (context.empty() ? std::string("partition") : context) +
                        " is not a ZV-ordered partition: " + base.failures.front().condition +
                        " " + base.failures.front().message);

    auto level = std::make_unique<FStar::Level>();
    level->graph = keep_alive;
    level->to_ambient = std::move(to_ambient);
    level->z_order = p.z_order;
    level->subgraph_of.assign(static_cast<size_t>(level_graph.vertex_count()), -1);

    for (size_t i = 0; i < p.subgraphs.size(); ++i) {
        const SubgraphSpec& spec = p.subgraphs[i];
        FStar::Level::Sub sub;
        sub.members = spec.members;
        sub.label = (context.empty() ? "" : context + ">") + "V_" + std::to_string(i + 1);
        for (Vertex v : spec.members)
            level->subgraph_of[static_cast<size_t>(v)] = static_cast<int>(i);
        sub.root = root_of(level_graph, p, static_cast<int>(i));

        if (spec.members.size() > 1) {
            if (!spec.nested)
                throw Error(Errc::MissingNestedPartition,
                            sub.label + " has " + std::to_string(spec.members.size()) +
                                " vertices but no nested partition");
            std::vector<Vertex> members_sorted = spec.members;
            std::sort(members_sorted.begin(), members_sorted.end());
            Graph induced = level_graph.induced(members_sorted);
            auto to_local = [&](Vertex v) {
                auto it = std::lower_bound(members_sorted.begin(), members_sorted.end(), v);
                if (it == members_sorted.end() || *it != v)
                    throw Error(Errc::UnknownVertex,
                                sub.label + "'s nested partition references a vertex outside it");
                return static_cast<Vertex>(it - members_sorted.begin());
            };
            std::function<ZvOrderedPartition(const ZvOrderedPartition&)> translate =
                [&](const ZvOrderedPartition& q) {
                    ZvOrderedPartition out;
                    for (Vertex z : q.z_order)
                        out.z_order.push_back(to_local(z));
                    for (const auto& s : q.subgraphs) {
                        SubgraphSpec t;
                        for (Vertex v : s.members)
                            t.members.push_back(to_local(v));
                        if (s.nested)
                            t.nested = translate(*s.nested);
                        out.subgraphs.push_back(std::move(t));
                    }
                    return out;
                };
            ZvOrderedPartition nested_local = translate(*spec.nested);
            std::vector<Vertex> nested_to_ambient(members_sorted.size());
            for (size_t j = 0; j < members_sorted.size(); ++j)
                nested_to_ambient[j] = level->ambient(members_sorted[j]);
            sub.nested = build_level(induced, nullptr, std::move(nested_to_ambient), nested_local,
                                     sub.label);
            sub.nested->owned.emplace(std::move(induced));
            sub.nested->graph = &*sub.nested->owned;
        }
        level->subs.push_back(std::move(sub));
    }
    return level;
}

} // namespace

FStar::FStar(const Graph& g, const ZvOrderedPartition& p, bool allow_weighted)
    : graph_(&g), partition_(p) {
    if (!g.unit_lengths() && !allow_weighted)
        throw Error(Errc::WeightedWithoutOverride,
                    "the graph has non-unit edge lengths; pass the explicit override to run F* anyway");
    std::vector<Vertex> identity(static_cast<size_t>(g.vertex_count()));
    for (Vertex v = 0; v < g.vertex_count(); ++v)
        identity[static_cast<size_t>(v)] = v;
    top_ = build_level(g, &g, std::move(identity), partition_, "");
    zv_line_valid_ = validate_zv_line(g, partition_).valid;
}

FStar::FStar(FStar&&) noexcept = default;
FStar& FStar::operator=(FStar&&) noexcept = default;
FStar::~FStar() = default;

namespace {

Vertex eval_level(const FStar::Level& level, std::vector<Vertex> ballots, int depth,
                  std::vector<TraceStep>& trace, const std::string& context) {
    const Graph& g = *level.graph;

    if (ballots.empty()) {
        // Empty profile: the leftmost Z-vertex, equivalently the first
        // vertex of the induced order (its Pareto set is every vertex).
        TraceStep step;
        step.depth = depth;
        step.context = context;
        step.branch = TraceStep::Branch::EmptyProfile;
        trace.push_back(std::move(step));
        return level.ambient(level.z_order.front());
    }

    if (!level.subs.empty()) {
        int id = level.subgraph_of[static_cast<size_t>(ballots.front())];
        if (id >= 0 &&
            std::all_of(ballots.begin(), ballots.end(), [&](Vertex b) {
                return level.subgraph_of[static_cast<size_t>(b)] == id;
            })) {
            const auto& sub = level.subs[static_cast<size_t>(id)];
            if (!sub.nested) {
                TraceStep step;
                step.depth = depth;
                step.context = context;
                step.branch = TraceStep::Branch::SingletonLeaf;
                step.subgraph = id;
                trace.push_back(std::move(step));
                return level.ambient(sub.members.front());
            }
            TraceStep step;
            step.depth = depth;
            step.context = context;
            step.branch = TraceStep::Branch::Recurse;
            step.subgraph = id;
            trace.push_back(std::move(step));
            // Translate ballots into the nested level's index space via the
            // shared ambient indices (both maps are ascending).
            std::vector<Vertex> nested_ballots;
            nested_ballots.reserve(ballots.size());
            for (Vertex b : ballots) {
                Vertex amb = level.ambient(b);
                auto it = std::lower_bound(sub.nested->to_ambient.begin(),
                                           sub.nested->to_ambient.end(), amb);
                nested_ballots.push_back(
                    static_cast<Vertex>(it - sub.nested->to_ambient.begin()));
            }
            return eval_level(*sub.nested, std::move(nested_ballots), depth + 1, trace, sub.label);
        }
    }

    auto po = pareto_set(g, Profile(ballots));
    std::vector<char> in_po(static_cast<size_t>(g.vertex_count()), 0);
    for (Vertex v : po)
        in_po[static_cast<size_t>(v)] = 1;
    TraceStep step;
    step.depth = depth;
    step.context = context;
    step.branch = TraceStep::Branch::LeftmostParetoZ;
    Vertex chosen = -1;
    for (Vertex z : level.z_order) {
        if (in_po[static_cast<size_t>(z)]) {
            if (chosen < 0)
                chosen = z;
            step.pareto_z.push_back(level.ambient(z));
        }
    }
    if (chosen < 0)
        throw Error(Errc::ParetoZEmpty,
                    "no Pareto optimal Z-vertex although the ballots span subgraphs; "
                    "the partition is not a valid ZV-ordered partition");
    trace.push_back(std::move(step));
    return level.ambient(chosen);
}

} // namespace

Outcome FStar::run(const Profile& x) const {
    for (Vertex b : x.ballots())
        if (b < 0 || b >= graph_->vertex_count())
            throw Error(Errc::UnknownVertex, "ballot index " + std::to_string(b) + " out of range");
    Outcome out;
    out.zv_line_partition = zv_line_valid_;
    out.vertex = eval_level(*top_, x.ballots(), 0, out.trace, "");
    return out;
}

namespace {

void collect_order(const FStar::Level& level, std::vector<char>& placed,
                   std::vector<Vertex>& order) {
    for (Vertex z : level.z_order) {
        Vertex amb = level.ambient(z);
        if (!placed[static_cast<size_t>(amb)]) {
            placed[static_cast<size_t>(amb)] = 1;
            order.push_back(amb);
        }
    }
    for (const auto& sub : level.subs) {
        if (sub.nested) {
            collect_order(*sub.nested, placed, order);
        } else {
            Vertex amb = level.ambient(sub.members.front());
            if (!placed[static_cast<size_t>(amb)]) {
                placed[static_cast<size_t>(amb)] = 1;
                order.push_back(amb);
            }
        }
    }
}

} // namespace

std::vector<Vertex> FStar::induced_order() const {
    std::vector<char> placed(static_cast<size_t>(graph_->vertex_count()), 0);
    std::vector<Vertex> order;
    collect_order(*top_, placed, order);
    return order;
}

namespace {

void collect_saturation(const FStar::Level& level, std::span<const int> tau_list,
                        std::vector<FStar::SaturationFailure>& out) {
    for (const auto& sub : level.subs) {
        for (int tau : tau_list) {
            Vertex got;
            if (!sub.nested) {
                got = level.ambient(sub.members.front());
            } else {
                std::vector<Vertex> ballots;
                for (Vertex v = 0; v < sub.nested->graph->vertex_count(); ++v)
                    for (int t = 0; t < tau; ++t)
                        ballots.push_back(v);
                std::vector<TraceStep> scratch;
                got = eval_level(*sub.nested, std::move(ballots), 0, scratch, sub.label);
            }
            Vertex expected = level.ambient(sub.root);
            if (got != expected)
                out.push_back({sub.label, tau, expected, got});
        }
        if (sub.nested)
            collect_saturation(*sub.nested, tau_list, out);
    }
}

} // namespace

std::vector<FStar::SaturationFailure>
FStar::root_saturation_failures(std::span<const int> tau_list) const {
    std::vector<SaturationFailure> out;
    collect_saturation(*top_, tau_list, out);
    return out;
}

Outcome f_star(const Graph& g, const ZvOrderedPartition& p, const Profile& x, bool allow_weighted) {
    return FStar(g, p, allow_weighted).run(x);
}

std::vector<Vertex> induced_global_order(const Graph& g, const ZvOrderedPartition& p) {
    return FStar(g, p, /*allow_weighted=*/true).induced_order();
}

// ---------------------------------------------------------------------------
// Order mechanism

Outcome order_mechanism(const Graph& g, std::span<const Vertex> order, const Profile& x) {
    require_total_order(g, order, "mechanism order");
    auto po = pareto_set(g, x);
    std::vector<char> in_po(static_cast<size_t>(g.vertex_count()), 0);
    for (Vertex v : po)
        in_po[static_cast<size_t>(v)] = 1;
    for (Vertex v : order) {
        if (in_po[static_cast<size_t>(v)]) {
            Outcome out;
            out.vertex = v;
            return out;
        }
    }
    throw Error(Errc::ParetoZEmpty, "empty Pareto set"); // unreachable: PO is never empty
}

// ---------------------------------------------------------------------------
// Rooted trees

Outcome lca_tree_mechanism(const Graph& g, Vertex root, const Profile& x) {
    if (static_cast<int>(g.edges().size()) != g.vertex_count() - 1)
        throw Error(Errc::NotATree, "graph has a cycle; the LCA mechanism needs a tree");
    if (x.empty())
        throw Error(Errc::EmptyProfile, "the LCA mechanism needs at least one ballot");
    if (root < 0 || root >= g.vertex_count())
        throw Error(Errc::UnknownVertex, "LCA root out of range");

    const int n = g.vertex_count();
    std::vector<Vertex> parent(static_cast<size_t>(n), -1);
    std::vector<int> depth(static_cast<size_t>(n), -1);
    std::vector<Vertex> queue = {root};
    depth[static_cast<size_t>(root)] = 0;
    for (size_t head = 0; head < queue.size(); ++head) {
        Vertex v = queue[head];
        for (Vertex u : g.neighbors(v)) {
            if (depth[static_cast<size_t>(u)] < 0) {
                depth[static_cast<size_t>(u)] = depth[static_cast<size_t>(v)] + 1;
                parent[static_cast<size_t>(u)] = v;
                queue.push_back(u);
            }
        }
    }

    auto lca = [&](Vertex a, Vertex b) {
        while (depth[static_cast<size_t>(a)] > depth[static_cast<size_t>(b)])
            a = parent[static_cast<size_t>(a)];
        while (depth[static_cast<size_t>(b)] > depth[static_cast<size_t>(a)])
            b = parent[static_cast<size_t>(b)];
        while (a != b) {
            a = parent[static_cast<size_t>(a)];
            b = parent[static_cast<size_t>(b)];
        }
        return a;
    };

    Vertex acc = x.ballots().front();
    for (Vertex b : x.ballots())
        acc = lca(acc, b);
    Outcome out;
    out.vertex = acc;
    return out;
}

// ---------------------------------------------------------------------------
// Block graphs

BlockCutTree block_cut_tree(const Graph& g) {
    const int n = g.vertex_count();
    BlockCutTree tree;
    if (n == 1) {
        tree.blocks.push_back({0});
        return tree;
    }

    std::vector<int> disc(static_cast<size_t>(n), -1), low(static_cast<size_t>(n), 0);
    std::vector<std::pair<Vertex, Vertex>> edge_stack;
    std::vector<char> is_cut(static_cast<size_t>(n), 0);
    int timer = 0;

    std::function<void(Vertex, Vertex)> dfs = [&](Vertex v, Vertex from) {
        disc[static_cast<size_t>(v)] = low[static_cast<size_t>(v)] = timer++;
        int children = 0;
        for (Vertex u : g.neighbors(v)) {
            if (u == from)
                continue;
            if (disc[static_cast<size_t>(u)] < 0) {
                ++children;
                edge_stack.emplace_back(v, u);
                dfs(u, v);
                low[static_cast<size_t>(v)] =
                    std::min(low[static_cast<size_t>(v)], low[static_cast<size_t>(u)]);
                if (low[static_cast<size_t>(u)] >= disc[static_cast<size_t>(v)]) {
                    if (from >= 0 || children > 1)
                        is_cut[static_cast<size_t>(v)] = 1;
                    std::vector<Vertex> block;
                    std::pair<Vertex, Vertex> e;
                    do {
                        e = edge_stack.back();
                        edge_stack.pop_back();
                        block.push_back(e.first);
                        block.push_back(e.second);
                    } while (e != std::make_pair(v, u));
                    std::sort(block.begin(), block.end());
                    block.erase(std::unique(block.begin(), block.end()), block.end());
                    tree.blocks.push_back(std::move(block));
                }
            } else if (disc[static_cast<size_t>(u)] < disc[static_cast<size_t>(v)]) {
                edge_stack.emplace_back(v, u);
                low[static_cast<size_t>(v)] =
                    std::min(low[static_cast<size_t>(v)], disc[static_cast<size_t>(u)]);
            }
        }
    };
    dfs(0, -1);

    for (Vertex v = 0; v < n; ++v)
        if (is_cut[static_cast<size_t>(v)])
            tree.cut_vertices.push_back(v);
    for (size_t b = 0; b < tree.blocks.size(); ++b) {
        for (Vertex v : tree.blocks[b]) {
            auto it = std::lower_bound(tree.cut_vertices.begin(), tree.cut_vertices.end(), v);
            if (it != tree.cut_vertices.end() && *it == v)
                tree.edges.emplace_back(static_cast<int>(b),
                                        static_cast<int>(it - tree.cut_vertices.begin()));
        }
    }
    return tree;
}

bool is_block_graph(const Graph& g) {
    for (const auto& block : block_cut_tree(g).blocks) {
        for (size_t i = 0; i < block.size(); ++i) {
            auto adj = g.neighbors(block[i]);
            for (size_t j = i + 1; j < block.size(); ++j)
                if (!std::binary_search(adj.begin(), adj.end(), block[j]))
                    return false;
        }
    }
    return true;
}

Outcome block_graph_mechanism(const Graph& g, Vertex anchor, std::span<const Vertex> order,
                              const Profile& x) {
    if (!is_block_graph(g))
        throw Error(Errc::NotABlockGraph, "some biconnected component is not a clique");
    if (anchor < 0 || anchor >= g.vertex_count())
        throw Error(Errc::UnknownVertex, "block-graph anchor out of range");
    std::vector<Vertex> tie =
        order.empty() ? construction_order(g) : std::vector<Vertex>(order.begin(), order.end());
    require_total_order(g, tie, "block-graph order");

    auto po = pareto_set(g, x);
    std::vector<char> in_po(static_cast<size_t>(g.vertex_count()), 0);
    for (Vertex v : po)
        in_po[static_cast<size_t>(v)] = 1;
    Vertex best = -1;
    Length best_d = std::numeric_limits<Length>::max();
    for (Vertex v : tie) {
        if (!in_po[static_cast<size_t>(v)])
            continue;
        Length d = g.distance(anchor, v);
        if (d < best_d) {
            best_d = d;
            best = v;
        }
    }
    Outcome out;
    out.vertex = best;
    return out;
}

// ---------------------------------------------------------------------------
// Baselines

Outcome median_mechanism(const Graph& g, std::span<const Vertex> tiebreak, const Profile& x) {
    return argmin_cost(g, tiebreak, x, [&](Vertex v) {
        long long sum = 0;
        for (Vertex b : x.ballots())
            sum += g.distance(b, v);
        return sum;
    });
}

Outcome mean_mechanism(const Graph& g, std::span<const Vertex> tiebreak, const Profile& x) {
    return argmin_cost(g, tiebreak, x, [&](Vertex v) {
        long long sum = 0;
        for (Vertex b : x.ballots()) {
            long long d = g.distance(b, v);
            sum += d * d;
        }
        return sum;
    });
}

Outcome fixed_mechanism(const Graph& g, Vertex location, const Profile&) {
    if (location < 0 || location >= g.vertex_count())
        throw Error(Errc::UnknownVertex, "fixed location out of range");
    Outcome out;
    out.vertex = location;
    return out;
}

Outcome dictator_mechanism(const Graph& g, int agent, std::span<const Vertex> ballots) {
    if (agent < 1)
        throw Error(Errc::InvalidParameters, "dictator index is 1-based");
    if (static_cast<size_t>(agent) > ballots.size())
        throw Error(Errc::EmptyProfile, "the dictating agent cast no ballot");
    Vertex v = ballots[static_cast<size_t>(agent - 1)];
    if (v < 0 || v >= g.vertex_count())
        throw Error(Errc::UnknownVertex, "ballot out of range");
    Outcome out;
    out.vertex = v;
    return out;
}

// ---------------------------------------------------------------------------
// Mechanism evaluator

Mechanism::Mechanism(const Graph& g, MechanismRef ref, const ZvOrderedPartition* partition,
                     bool allow_weighted)
    : graph_(&g), ref_(std::move(ref)) {
    switch (ref_.kind) {
    case MechanismKind::FStar:
        if (!partition)
            throw Error(Errc::InvalidParameters, "F* needs a ZV-ordered partition");
        fstar_.emplace(g, *partition, allow_weighted);
        break;
    case MechanismKind::Order:
        require_total_order(g, ref_.order, "mechanism order");
        break;
    case MechanismKind::LcaTree:
    case MechanismKind::Fixed:
    case MechanismKind::Dictator:
        break;
    case MechanismKind::BlockGraph:
        if (!ref_.order.empty())
            require_total_order(g, ref_.order, "block-graph order");
        break;
    case MechanismKind::Median:
    case MechanismKind::Mean:
        // Default tie-break: the induced global order when a fully nested
        // partition is at hand, the construction order otherwise.
        if (!ref_.order.empty()) {
            require_total_order(g, ref_.order, "tie-break order");
            tiebreak_ = ref_.order;
        } else if (partition) {
            try {
                tiebreak_ = induced_global_order(g, *partition);
            } catch (const Error&) {
                tiebreak_ = construction_order(g);
            }
        } else {
            tiebreak_ = construction_order(g);
        }
        break;
    }
}

Outcome Mechanism::run(const Profile& x) const {
    switch (ref_.kind) {
    case MechanismKind::FStar:
        return fstar_->run(x);
    case MechanismKind::Order:
        return order_mechanism(*graph_, ref_.order, x);
    case MechanismKind::LcaTree:
        return lca_tree_mechanism(*graph_, ref_.anchor, x);
    case MechanismKind::BlockGraph:
        return block_graph_mechanism(*graph_, ref_.anchor, ref_.order, x);
    case MechanismKind::Median:
        return median_mechanism(*graph_, tiebreak_, x);
    case MechanismKind::Mean:
        return mean_mechanism(*graph_, tiebreak_, x);
    case MechanismKind::Fixed:
        return fixed_mechanism(*graph_, ref_.anchor, x);
    case MechanismKind::Dictator:
        return dictator_mechanism(*graph_, ref_.agent, x.ballots());
    }
    throw Error(Errc::InvalidParameters, "unknown mechanism kind");
}

Outcome Mechanism::run_sequence(std::span<const Vertex> ballots) const {
    if (ref_.kind == MechanismKind::Dictator)
        return dictator_mechanism(*graph_, ref_.agent, ballots);
    return run(Profile(std::vector<Vertex>(ballots.begin(), ballots.end())));
}

// ---------------------------------------------------------------------------
// Disconnected ensembles

std::string disconnected_wrapper(std::span<const ComponentMechanism> components,
                                 std::span<const std::string> ballots) {
    if (ballots.empty())
        throw Error(Errc::EmptyProfile, "the component choice needs at least one ballot");
    for (const std::string& b : ballots) {
        bool known = false;
        for (const auto& c : components)
            if (c.graph->find(b))
                known = true;
        if (!known)
            throw Error(Errc::UnknownBallot, "ballot '" + b + "' is in no component");
    }
    for (const auto& c : components) {
        std::vector<Vertex> local;
        for (const std::string& b : ballots)
            if (auto v = c.graph->find(b))
                local.push_back(*v);
        if (local.empty())
            continue;
        Outcome out = c.mechanism->run(Profile(std::move(local)));
        return c.graph->name(out.vertex);
    }
    throw Error(Errc::UnknownBallot, "no component holds a ballot"); // unreachable
}

} // namespace zvl
