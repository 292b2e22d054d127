#include "zvl/families.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace zvl {

namespace {

void need(bool ok, const std::string& what) {
    if (!ok)
        throw Error(Errc::InvalidParameters, what);
}

std::string spec_label(const FamilySpec& spec) {
    std::string s = spec.name + "(";
    for (size_t i = 0; i < spec.params.size(); ++i) {
        if (i)
            s += ",";
        s += std::to_string(spec.params[i]);
    }
    return s + ")";
}

ZvOrderedPartition singleton_subgraphs(const Graph& g, std::vector<std::string> z,
                                       std::vector<std::string> singles) {
    ZvOrderedPartition p;
    for (const auto& name : z)
        p.z_order.push_back(g.vertex(name));
    for (const auto& name : singles)
        p.subgraphs.push_back({{g.vertex(name)}, std::nullopt});
    return p;
}

AnnotatedGraph make_clique(const FamilySpec& spec) {
    need(spec.params.size() == 1 && spec.params[0] >= 1, "clique needs one parameter >= 1");
    int l = spec.params[0];
    std::vector<std::string> names;
    for (int i = 1; i <= l; ++i)
        names.push_back("z" + std::to_string(i));
    std::vector<EdgeSpec> edges;
    for (int i = 0; i < l; ++i)
        for (int j = i + 1; j < l; ++j)
            edges.push_back({names[static_cast<size_t>(i)], names[static_cast<size_t>(j)]});
    Graph g(names, edges);
    ZvOrderedPartition p;
    for (int i = 0; i < l; ++i)
        p.z_order.push_back(i);
    return {std::move(g), std::move(p), spec_label(spec),
            "complete graph; every vertex is a Z-vertex, any order works", 0};
}

AnnotatedGraph make_biclique(const FamilySpec& spec) {
    need(spec.params.size() == 2 && spec.params[0] >= 1 && spec.params[1] >= 1,
         "biclique needs two parameters >= 1");
    int a = spec.params[0], b = spec.params[1];
    std::vector<std::string> names, z, v;
    for (int i = 1; i <= a; ++i) {
        z.push_back("z" + std::to_string(i));
        names.push_back(z.back());
    }
    for (int i = 1; i <= b; ++i) {
        v.push_back("v" + std::to_string(i));
        names.push_back(v.back());
    }
    std::vector<EdgeSpec> edges;
    for (const auto& zn : z)
        for (const auto& vn : v)
            edges.push_back({zn, vn});
    Graph g(names, edges);
    auto p = singleton_subgraphs(g, z, v);
    return {std::move(g), std::move(p), spec_label(spec),
            "full bipartite graph; one side is Z, each opposite vertex a singleton subgraph", 0};
}

AnnotatedGraph make_discrete_line(const FamilySpec& spec) {
    need(spec.params.size() == 1 && spec.params[0] >= 1, "discrete_line needs one parameter >= 1");
    int k = spec.params[0];
    std::vector<std::string> names, z, v;
    for (int i = 1; i <= k; ++i)
        z.push_back("z" + std::to_string(i));
    for (int i = 1; i < k; ++i)
        v.push_back("v" + std::to_string(i));
    for (int i = 0; i < k; ++i) {
        names.push_back(z[static_cast<size_t>(i)]);
        if (i + 1 < k)
            names.push_back(v[static_cast<size_t>(i)]);
    }
    std::vector<EdgeSpec> edges;
    for (int i = 0; i + 1 < k; ++i) {
        edges.push_back({z[static_cast<size_t>(i)], v[static_cast<size_t>(i)]});
        edges.push_back({v[static_cast<size_t>(i)], z[static_cast<size_t>(i + 1)]});
    }
    Graph g(names, edges);
    auto p = singleton_subgraphs(g, z, v);
    return {std::move(g), std::move(p), spec_label(spec),
            "discrete line; consecutive Z-vertices joined by a unique V-vertex", 0};
}

AnnotatedGraph make_double_v_line(const FamilySpec& spec) {
    need(spec.params.size() == 1 && spec.params[0] >= 2, "double_v_line needs one parameter >= 2");
    int k = spec.params[0];
    std::vector<std::string> names, z, v;
    for (int i = 1; i <= k; ++i) {
        z.push_back("z" + std::to_string(i));
        names.push_back(z.back());
    }
    for (int i = 1; i <= 2 * (k - 1); ++i) {
        v.push_back("v" + std::to_string(i));
        names.push_back(v.back());
    }
    std::vector<EdgeSpec> edges;
    for (int i = 0; i + 1 < k; ++i) {
        for (int side = 0; side < 2; ++side) {
            const std::string& mid = v[static_cast<size_t>(2 * i + side)];
            edges.push_back({z[static_cast<size_t>(i)], mid});
            edges.push_back({mid, z[static_cast<size_t>(i + 1)]});
        }
    }
    Graph g(names, edges);
    auto p = singleton_subgraphs(g, z, v);
    return {std::move(g), std::move(p), spec_label(spec),
            "consecutive Z-vertices joined by two V-vertices", 0};
}

AnnotatedGraph make_grid2n(const FamilySpec& spec) {
    need(spec.params.size() == 1 && spec.params[0] >= 1, "grid2n needs one parameter >= 1");
    int n = spec.params[0];
    std::vector<std::string> names, z, v;
    for (int i = 1; i <= n; ++i) {
        z.push_back("z" + std::to_string(i));
        names.push_back(z.back());
    }
    for (int i = 1; i <= n; ++i) {
        v.push_back("v" + std::to_string(i));
        names.push_back(v.back());
    }
    std::vector<EdgeSpec> edges;
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            if (std::abs(i - j) <= 1)
                edges.push_back({z[static_cast<size_t>(i - 1)], v[static_cast<size_t>(j - 1)]});
    Graph g(names, edges);
    auto p = singleton_subgraphs(g, z, v);
    return {std::move(g), std::move(p), spec_label(spec),
            "2x" + std::to_string(n) +
                " grid drawn as a zigzag: grid cell (row,col) maps to z<col> when col is odd in "
                "the top row and v<col> otherwise; zi~vj iff |i-j|<=1",
            0};
}

// The recursive rooted family: a single vertex, or ell pre-roots joined by a
// bi-clique to the roots of k smaller members.
void build_family_f(const std::string& prefix, int depth, int ell, int k,
                    std::vector<std::string>& names, std::vector<EdgeSpec>& edges,
                    std::string& root_name, ZvOrderedPartition* partition_out,
                    const std::function<Vertex(const std::string&)>& index_of_name,
                    std::vector<std::string>& member_names) {
    if (depth == 0) {
        std::string leaf = prefix + "r1";
        names.push_back(leaf);
        member_names.push_back(leaf);
        root_name = leaf;
        if (partition_out)
            partition_out->z_order.push_back(index_of_name(leaf));
        return;
    }
    std::vector<std::string> pre_roots;
    for (int j = 1; j <= ell; ++j) {
        pre_roots.push_back(prefix + "r" + std::to_string(j));
        names.push_back(pre_roots.back());
        member_names.push_back(pre_roots.back());
    }
    std::vector<std::string> child_roots;
    std::vector<std::pair<std::vector<std::string>, ZvOrderedPartition>> children;
    for (int i = 1; i <= k; ++i) {
        std::string child_root;
        ZvOrderedPartition child_partition;
        std::vector<std::string> child_members;
        build_family_f(prefix + "s" + std::to_string(i), depth - 1, ell, k, names, edges,
                       child_root, partition_out ? &child_partition : nullptr, index_of_name,
                       child_members);
        child_roots.push_back(child_root);
        member_names.insert(member_names.end(), child_members.begin(), child_members.end());
        children.emplace_back(std::move(child_members), std::move(child_partition));
    }
    for (const auto& pr : pre_roots)
        for (const auto& cr : child_roots)
            edges.push_back({pr, cr});
    root_name = pre_roots.front();
    if (partition_out) {
        for (const auto& pr : pre_roots)
            partition_out->z_order.push_back(index_of_name(pr));
        for (auto& [child_members, child_partition] : children) {
            SubgraphSpec sub;
            for (const auto& m : child_members)
                sub.members.push_back(index_of_name(m));
            if (child_members.size() > 1)
                sub.nested = std::move(child_partition);
            partition_out->subgraphs.push_back(std::move(sub));
        }
    }
}

AnnotatedGraph make_family_f(const FamilySpec& spec, bool as_tree) {
    int depth, ell, k;
    if (as_tree) {
        need(spec.params.size() == 2 && spec.params[0] >= 0 && spec.params[1] >= 1,
             "rooted_tree needs DEPTH >= 0 and BRANCHING >= 1");
        depth = spec.params[0];
        ell = 1;
        k = spec.params[1];
    } else {
        need(spec.params.size() == 3 && spec.params[0] >= 0 && spec.params[1] >= 1 &&
                 spec.params[2] >= 1,
             "family_F needs DEPTH >= 0, ELL >= 1, K >= 1");
        depth = spec.params[0];
        ell = spec.params[1];
        k = spec.params[2];
    }

    // Two passes: the first collects names so the second can map them to
    // construction indices while assembling the partition.
    std::vector<std::string> names;
    std::vector<EdgeSpec> edges;
    std::string root_name;
    std::vector<std::string> member_names;
    {
        std::vector<std::string> scratch_names;
        std::vector<EdgeSpec> scratch_edges;
        std::string scratch_root;
        std::vector<std::string> scratch_members;
        build_family_f("", depth, ell, k, scratch_names, scratch_edges, scratch_root, nullptr,
                       [](const std::string&) { return -1; }, scratch_members);
        names = std::move(scratch_names);
    }
    std::vector<std::string> order = names;
    auto index_of = [&order](const std::string& s) {
        auto it = std::find(order.begin(), order.end(), s);
        return static_cast<Vertex>(it - order.begin());
    };
    names.clear();
    ZvOrderedPartition p;
    build_family_f("", depth, ell, k, names, edges, root_name, &p, index_of, member_names);

    Graph g(names, edges);
    std::string note = as_tree ? "rooted tree via the recursive family with one pre-root per level"
                               : "recursive family: a layer of pre-roots bi-clique-joined to the "
                                 "roots of the previous stage";
    return {std::move(g), std::move(p), spec_label(spec), note, index_of(root_name)};
}

AnnotatedGraph make_block_graph(const FamilySpec& spec) {
    need(!spec.params.empty(), "block_graph needs clique sizes");
    for (int s : spec.params)
        need(s >= 2, "block_graph clique sizes must be >= 2");
    const auto& sizes = spec.params;

    std::vector<std::string> names;
    std::vector<EdgeSpec> edges;
    std::vector<std::vector<std::string>> cliques;
    std::string port;
    for (size_t i = 0; i < sizes.size(); ++i) {
        std::vector<std::string> clique;
        if (i > 0)
            clique.push_back(port); // shared cut vertex with the previous clique
        int fresh = sizes[i] - (i > 0 ? 1 : 0);
        for (int j = 1; j <= fresh; ++j) {
            clique.push_back("b" + std::to_string(i + 1) + "_" + std::to_string(j));
            names.push_back(clique.back());
        }
        for (size_t x = 0; x < clique.size(); ++x)
            for (size_t y = x + 1; y < clique.size(); ++y)
                edges.push_back({clique[x], clique[y]});
        port = clique.back();
        cliques.push_back(std::move(clique));
    }
    Graph g(names, edges);

    // Partition derived from the block-cut tree rooted at the first clique:
    // Z is the root clique; everything beyond its port hangs off the port as
    // one subgraph, recursively.
    std::function<ZvOrderedPartition(size_t)> from_clique = [&](size_t i) {
        ZvOrderedPartition p;
        for (const auto& name : cliques[i])
            p.z_order.push_back(g.vertex(name));
        if (i + 1 < cliques.size()) {
            SubgraphSpec sub;
            for (size_t j = i + 1; j < cliques.size(); ++j)
                for (const auto& name : cliques[j])
                    if (std::find(sub.members.begin(), sub.members.end(), g.vertex(name)) ==
                        sub.members.end())
                        sub.members.push_back(g.vertex(name));
            sub.nested = from_clique(i + 1);
            p.subgraphs.push_back(std::move(sub));
        }
        return p;
    };
    ZvOrderedPartition p = from_clique(0);
    return {std::move(g), std::move(p), spec_label(spec),
            "path of cliques sharing cut vertices; partition follows the block-cut tree rooted "
            "at the first clique",
            0};
}

AnnotatedGraph make_cycle(const FamilySpec& spec) {
    need(spec.params.size() == 1 && spec.params[0] >= 3, "cycle needs one parameter >= 3");
    int m = spec.params[0];
    std::vector<std::string> names;
    for (int i = 1; i <= m; ++i)
        names.push_back("c" + std::to_string(i));
    std::vector<EdgeSpec> edges;
    for (int i = 0; i < m; ++i)
        edges.push_back({names[static_cast<size_t>(i)], names[static_cast<size_t>((i + 1) % m)]});
    Graph g(names, edges);

    std::optional<ZvOrderedPartition> p;
    std::string note;
    if (m == 3) {
        p = ZvOrderedPartition{{0, 1, 2}, {}};
        note = "triangle = 3-clique, all vertices in Z";
    } else if (m == 4) {
        ZvOrderedPartition q;
        q.z_order = {g.vertex("c1"), g.vertex("c3")};
        q.subgraphs.push_back({{g.vertex("c2")}, std::nullopt});
        q.subgraphs.push_back({{g.vertex("c4")}, std::nullopt});
        p = std::move(q);
        note = "4-cycle as the 2x2 bi-clique: opposite pair in Z";
    } else if (m == 5) {
        note = "not a ZV-line graph; manipulation-resistant order mechanisms exist regardless";
    } else {
        note = "not a ZV-line graph; no manipulation-resistant Pareto optimal anonymous "
               "mechanism is known";
    }
    return {std::move(g), std::move(p), spec_label(spec), note, -1};
}

AnnotatedGraph make_nonregular(const FamilySpec& spec) {
    need(spec.params.empty(), "nonregular_example takes no parameters");
    std::vector<std::string> names = {"a1", "a2", "b1", "b2", "b3", "c1", "c2", "c3"};
    std::vector<EdgeSpec> edges = {
        {"a1", "a2"}, {"a1", "b1"}, {"a2", "b2"}, {"b1", "b2"}, {"b2", "b3"},
        {"b1", "c1"}, {"b2", "c2"}, {"b3", "c3"}, {"c1", "c2"}, {"c2", "c3"},
    };
    Graph g(names, edges);
    ZvOrderedPartition p;
    for (const char* zn : {"a2", "b1", "c2", "b3"})
        p.z_order.push_back(g.vertex(zn));
    for (const char* vn : {"b2", "a1", "c1", "c3"})
        p.subgraphs.push_back({{g.vertex(vn)}, std::nullopt});
    return {std::move(g), std::move(p), spec_label(spec),
            "three stacked boxes; partition transcribed from the non-regular drawing (Z order "
            "a2,b1,c2,b3; b2 attaches to all of Z, the other V-vertices to consecutive pairs)",
            -1};
}

AnnotatedGraph make_weighted_counterexample(const FamilySpec& spec) {
    need(spec.params.empty(), "weighted_counterexample takes no parameters");
    Graph g({"zl", "zr", "v"}, {{"v", "zl", 1}, {"v", "zr", 10}});
    ZvOrderedPartition p;
    p.z_order = {g.vertex("zl"), g.vertex("zr")};
    p.subgraphs.push_back({{g.vertex("v")}, std::nullopt});
    return {std::move(g), std::move(p), spec_label(spec),
            "two Z-vertices joined through one V-vertex by edges of length 1 and 10; a valid "
            "ordered partition that fails ZV-line validation (unit lengths required)",
            -1};
}

} // namespace

std::vector<std::string> family_names() {
    return {"clique",      "biclique",           "discrete_line",
            "double_v_line", "grid2n",           "family_F",
            "rooted_tree", "block_graph",        "cycle",
            "nonregular_example", "weighted_counterexample"};
}

AnnotatedGraph generate(const FamilySpec& spec) {
    if (spec.name == "clique")
        return make_clique(spec);
    if (spec.name == "biclique")
        return make_biclique(spec);
    if (spec.name == "discrete_line")
        return make_discrete_line(spec);
    if (spec.name == "double_v_line")
        return make_double_v_line(spec);
    if (spec.name == "grid2n")
        return make_grid2n(spec);
    if (spec.name == "family_F")
        return make_family_f(spec, false);
    if (spec.name == "rooted_tree")
        return make_family_f(spec, true);
    if (spec.name == "block_graph")
        return make_block_graph(spec);
    if (spec.name == "cycle")
        return make_cycle(spec);
    if (spec.name == "nonregular_example")
        return make_nonregular(spec);
    if (spec.name == "weighted_counterexample")
        return make_weighted_counterexample(spec);
    throw Error(Errc::InvalidParameters, "unknown family '" + spec.name + "'");
}

std::vector<std::vector<Vertex>> c5_orders() {
    // Base orders transcribed from the labeled 5-cycle drawings: the label at
    // a cycle position is the position's rank in the order.
    const std::vector<std::vector<Vertex>> bases = {
        {0, 1, 4, 2, 3}, // labels 1,2,4,5,3 around the cycle
        {0, 1, 4, 3, 2}, // labels 1,2,5,4,3
        {0, 1, 3, 4, 2}, // labels 1,2,5,3,4
    };
    std::set<std::vector<Vertex>> closed;
    for (int rot = 0; rot < 5; ++rot) {
        for (int flip = 0; flip < 2; ++flip) {
            auto sigma = [&](Vertex v) {
                int w = flip ? (5 - v) % 5 : v;
                return static_cast<Vertex>((w + rot) % 5);
            };
            for (const auto& base : bases) {
                std::vector<Vertex> image;
                for (Vertex v : base)
                    image.push_back(sigma(v));
                closed.insert(std::move(image));
            }
        }
    }
    return {closed.begin(), closed.end()};
}

// ---------------------------------------------------------------------------
// Recognizer

namespace {

struct SearchCtx {
    unsigned long long budget;
    unsigned long long nodes = 0;

    void tick() {
        if (++nodes > budget)
            throw Error(Errc::BudgetExceeded,
                        "recognizer stopped after " + std::to_string(budget) + " search nodes");
    }
};

struct ComponentInfo {
    std::vector<Vertex> vertices;      // sorted
    std::vector<Vertex> boundary;      // Z-neighbors, sorted unique
    std::optional<Vertex> gate;        // unique member adjacent to Z, if any
};

std::vector<ComponentInfo> components_without_z(const Graph& g, const std::vector<char>& in_z) {
    const int n = g.vertex_count();
    std::vector<ComponentInfo> comps;
    std::vector<char> seen(static_cast<size_t>(n), 0);
    for (Vertex s = 0; s < n; ++s) {
        if (in_z[static_cast<size_t>(s)] || seen[static_cast<size_t>(s)])
            continue;
        ComponentInfo info;
        std::vector<Vertex> stack = {s};
        seen[static_cast<size_t>(s)] = 1;
        while (!stack.empty()) {
            Vertex v = stack.back();
            stack.pop_back();
            info.vertices.push_back(v);
            for (Vertex u : g.neighbors(v)) {
                if (in_z[static_cast<size_t>(u)]) {
                    info.boundary.push_back(u);
                } else if (!seen[static_cast<size_t>(u)]) {
                    seen[static_cast<size_t>(u)] = 1;
                    stack.push_back(u);
                }
            }
        }
        std::sort(info.vertices.begin(), info.vertices.end());
        std::sort(info.boundary.begin(), info.boundary.end());
        info.boundary.erase(std::unique(info.boundary.begin(), info.boundary.end()),
                            info.boundary.end());
        std::vector<Vertex> touching;
        for (Vertex v : info.vertices)
            for (Vertex u : g.neighbors(v))
                if (in_z[static_cast<size_t>(u)]) {
                    touching.push_back(v);
                    break;
                }
        if (touching.size() == 1)
            info.gate = touching.front();
        comps.push_back(std::move(info));
    }
    return comps;
}

bool sets_admit_interval_order(const std::vector<std::vector<Vertex>>& constraints,
                               const std::vector<Vertex>& z, std::optional<Vertex> required_first,
                               SearchCtx& ctx, std::vector<Vertex>* order_out) {
    // Backtracking placement, left to right. A partial placement survives
    // when every constraint set's placed members are contiguous and, if the
    // set is unfinished, its block ends at the last placed position.
    const size_t m = z.size();
    std::vector<Vertex> order;
    std::vector<char> used(m, 0);

    std::vector<std::vector<int>> member_of(m); // z index -> constraint ids
    for (size_t c = 0; c < constraints.size(); ++c)
        for (Vertex v : constraints[c]) {
            auto it = std::lower_bound(z.begin(), z.end(), v);
            member_of[static_cast<size_t>(it - z.begin())].push_back(static_cast<int>(c));
        }
    std::vector<int> placed_count(constraints.size(), 0);
    std::vector<int> first_pos(constraints.size(), -1);
    std::vector<int> last_pos(constraints.size(), -1);

    auto feasible = [&](size_t zi, int pos) {
        for (int c : member_of[zi]) {
            if (placed_count[static_cast<size_t>(c)] == 0)
                continue;
            // The set already started; the new member must extend its block.
            if (last_pos[static_cast<size_t>(c)] != pos - 1)
                return false;
        }
        // Sets not containing this vertex but still unfinished and already
        // started must not be interrupted.
        for (size_t c = 0; c < constraints.size(); ++c) {
            if (placed_count[c] == 0 ||
                placed_count[c] == static_cast<int>(constraints[c].size()))
                continue;
            bool contains = std::binary_search(constraints[c].begin(), constraints[c].end(),
                                               z[zi]);
            if (!contains && last_pos[c] == pos - 1)
                return false;
        }
        return true;
    };

    std::function<bool()> place = [&]() -> bool {
        if (order.size() == m) {
            *order_out = order;
            return true;
        }
        int pos = static_cast<int>(order.size());
        for (size_t zi = 0; zi < m; ++zi) {
            if (used[zi])
                continue;
            if (pos == 0 && required_first && z[zi] != *required_first)
                continue;
            ctx.tick();
            if (!feasible(zi, pos))
                continue;
            used[zi] = 1;
            order.push_back(z[zi]);
            std::vector<std::pair<int, std::pair<int, int>>> saved;
            for (int c : member_of[zi]) {
                saved.push_back({c, {first_pos[static_cast<size_t>(c)],
                                     last_pos[static_cast<size_t>(c)]}});
                if (placed_count[static_cast<size_t>(c)]++ == 0)
                    first_pos[static_cast<size_t>(c)] = pos;
                last_pos[static_cast<size_t>(c)] = pos;
            }
            if (place())
                return true;
            for (auto& [c, fl] : saved) {
                --placed_count[static_cast<size_t>(c)];
                first_pos[static_cast<size_t>(c)] = fl.first;
                last_pos[static_cast<size_t>(c)] = fl.second;
            }
            order.pop_back();
            used[zi] = 0;
        }
        return false;
    };
    return place();
}

// Recognize `g`, optionally requiring the leftmost Z-vertex. When `count`
// is non-null the search keeps going and accumulates witnesses instead of
// returning the first.
std::optional<ZvOrderedPartition> search_level(const Graph& g, std::optional<Vertex> required_first,
                                               SearchCtx& ctx, unsigned long long* count);

std::optional<ZvOrderedPartition> try_grouping(const Graph& g, const std::vector<Vertex>& z,
                                               const std::vector<char>& in_z,
                                               const std::vector<std::pair<ComponentInfo, bool>>&
                                                   assigned, // (component, merged-into-Z-root)
                                               std::optional<Vertex> required_first, SearchCtx& ctx,
                                               unsigned long long* count) {
    // Build the V_i list: own components keep their gate as root; merged
    // components group by their boundary Z-vertex.
    struct Candidate {
        std::vector<Vertex> members;
        Vertex root;
    };
    std::vector<Candidate> subs;
    std::vector<char> z_used(z.size(), 0);
    std::map<Vertex, std::vector<Vertex>> merged; // z0 -> union of members
    for (const auto& [comp, merge] : assigned) {
        if (merge) {
            auto& bucket = merged[comp.boundary.front()];
            bucket.insert(bucket.end(), comp.vertices.begin(), comp.vertices.end());
        } else {
            subs.push_back({comp.vertices, *comp.gate});
        }
    }
    for (auto& [z0, members] : merged) {
        members.push_back(z0);
        std::sort(members.begin(), members.end());
        subs.push_back({std::move(members), z0});
        auto it = std::lower_bound(z.begin(), z.end(), z0);
        z_used[static_cast<size_t>(it - z.begin())] = 1;
    }

    // Z must keep a private vertex.
    bool z_has_private = false;
    for (size_t i = 0; i < z.size(); ++i)
        if (!z_used[i])
            z_has_private = true;
    if (!z_has_private && !z.empty())
        return std::nullopt;

    std::sort(subs.begin(), subs.end(),
              [](const Candidate& a, const Candidate& b) { return a.members < b.members; });

    // Interval constraints from the candidate structure.
    std::vector<std::vector<Vertex>> constraints;
    auto ball1_cap_z = [&](Vertex v) {
        std::vector<Vertex> s;
        if (in_z[static_cast<size_t>(v)])
            s.push_back(v);
        for (Vertex u : g.neighbors(v))
            if (in_z[static_cast<size_t>(u)])
                s.push_back(u);
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        return s;
    };
    for (Vertex zv : z)
        constraints.push_back(ball1_cap_z(zv));
    for (const auto& sub : subs)
        constraints.push_back(ball1_cap_z(sub.root));

    std::vector<Vertex> order;
    if (!sets_admit_interval_order(constraints, z, required_first, ctx, &order))
        return std::nullopt;

    // Recurse into every non-singleton subgraph.
    ZvOrderedPartition result;
    result.z_order = order;
    unsigned long long combinations = 1;
    for (const auto& sub : subs) {
        SubgraphSpec spec;
        spec.members = sub.members;
        if (sub.members.size() > 1) {
            Graph induced = g.induced(sub.members);
            std::vector<Vertex> sorted = sub.members;
            auto local_of = [&](Vertex v) {
                auto it = std::lower_bound(sorted.begin(), sorted.end(), v);
                return static_cast<Vertex>(it - sorted.begin());
            };
            unsigned long long sub_count = 0;
            auto nested = search_level(induced, local_of(sub.root), ctx, count ? &sub_count : nullptr);
            if (count) {
                if (sub_count == 0)
                    return std::nullopt;
                combinations *= sub_count;
            } else if (!nested) {
                return std::nullopt;
            }
            if (nested) {
                // Translate the whole nested tree back to this level's indices.
                std::function<ZvOrderedPartition(const ZvOrderedPartition&)> up =
                    [&](const ZvOrderedPartition& q) {
                        ZvOrderedPartition out;
                        for (Vertex v : q.z_order)
                            out.z_order.push_back(sorted[static_cast<size_t>(v)]);
                        for (const auto& s : q.subgraphs) {
                            SubgraphSpec t;
                            for (Vertex v : s.members)
                                t.members.push_back(sorted[static_cast<size_t>(v)]);
                            if (s.nested)
                                t.nested = up(*s.nested);
                            out.subgraphs.push_back(std::move(t));
                        }
                        return out;
                    };
                spec.nested = up(*nested);
            }
        }
        result.subgraphs.push_back(std::move(spec));
    }
    if (count) {
        // Count one canonical witness per (Z, grouping, nested choices); the
        // specific interval order found above stands in for the class.
        *count += combinations;
        return std::nullopt;
    }
    return result;
}

std::optional<ZvOrderedPartition> search_level(const Graph& g, std::optional<Vertex> required_first,
                                               SearchCtx& ctx, unsigned long long* count) {
    const int n = g.vertex_count();
    if (n == 1) {
        if (count)
            ++*count;
        ZvOrderedPartition p;
        p.z_order = {0};
        if (count)
            return std::nullopt;
        return p;
    }

    // Z candidates by ascending size, lexicographic within a size.
    std::vector<Vertex> subset;
    for (int size = 1; size <= n; ++size) {
        std::optional<ZvOrderedPartition> found;
        std::function<bool(Vertex, int)> choose = [&](Vertex from, int remaining) -> bool {
            if (remaining == 0) {
                ctx.tick();
                if (required_first &&
                    !std::binary_search(subset.begin(), subset.end(), *required_first))
                    return false;
                std::vector<char> in_z(static_cast<size_t>(n), 0);
                for (Vertex v : subset)
                    in_z[static_cast<size_t>(v)] = 1;
                auto comps = components_without_z(g, in_z);

                // Per-component options; bail out if one has none.
                for (const auto& c : comps)
                    if (!c.gate && c.boundary.size() != 1)
                        return false;

                // Enumerate own/merge decisions (own first).
                std::vector<std::pair<ComponentInfo, bool>> assigned(comps.size());
                std::function<bool(size_t)> decide = [&](size_t idx) -> bool {
                    if (idx == comps.size()) {
                        ctx.tick();
                        auto r = try_grouping(g, subset, in_z, assigned, required_first, ctx,
                                              count);
                        if (r) {
                            found = std::move(r);
                            return true;
                        }
                        return false;
                    }
                    const auto& c = comps[idx];
                    if (c.gate) {
                        assigned[idx] = {c, false};
                        if (decide(idx + 1))
                            return true;
                    }
                    if (c.boundary.size() == 1) {
                        assigned[idx] = {c, true};
                        if (decide(idx + 1))
                            return true;
                    }
                    return false;
                };
                return decide(0);
            }
            for (Vertex v = from; v <= n - remaining; ++v) {
                subset.push_back(v);
                if (choose(v + 1, remaining - 1))
                    return true;
                subset.pop_back();
            }
            return false;
        };
        if (choose(0, size) && !count)
            return found;
    }
    return std::nullopt;
}

} // namespace

std::optional<ZvOrderedPartition> recognize_zv_line(const Graph& g, const RecognizeLimits& limits) {
    if (g.vertex_count() > limits.max_vertices)
        throw Error(Errc::InvalidParameters,
                    "recognizer bound is " + std::to_string(limits.max_vertices) +
                        " vertices; got " + std::to_string(g.vertex_count()));
    if (!g.unit_lengths())
        return std::nullopt; // the family is defined for unit lengths only
    SearchCtx ctx{limits.node_budget};
    return search_level(g, std::nullopt, ctx, nullptr);
}

unsigned long long count_zv_line_partitions(const Graph& g, const RecognizeLimits& limits) {
    if (g.vertex_count() > 8)
        throw Error(Errc::InvalidParameters, "count-all is gated to graphs of at most 8 vertices");
    if (!g.unit_lengths())
        return 0;
    SearchCtx ctx{limits.node_budget};
    unsigned long long count = 0;
    search_level(g, std::nullopt, ctx, &count);
    return count;
}

} // namespace zvl
