#include "zvl/zv_partition.hpp"

#include <algorithm>
#include <unordered_map>

namespace zvl {

namespace {

std::string name_list(const Graph& g, std::span<const Vertex> vs) {
    std::string out;
    for (Vertex v : vs) {
        if (!out.empty())
            out += ",";
        out += g.name(v);
    }
    return out;
}

void check_vertices(const Graph& g, const ZvOrderedPartition& p) {
    auto check = [&](Vertex v) {
        if (v < 0 || v >= g.vertex_count())
            throw Error(Errc::UnknownVertex, "partition references vertex index " + std::to_string(v));
    };
    for (Vertex z : p.z_order)
        check(z);
    for (const SubgraphSpec& s : p.subgraphs) {
        for (Vertex v : s.members)
            check(v);
        if (s.nested)
            check_vertices(g, *s.nested);
    }
}

// Vertices of `from` reachable in g with `removed` deleted.
std::vector<char> reachable_without(const Graph& g, std::span<const Vertex> from,
                                    const std::vector<char>& removed) {
    std::vector<char> seen(static_cast<size_t>(g.vertex_count()), 0);
    std::vector<Vertex> stack;
    for (Vertex v : from) {
        if (!removed[static_cast<size_t>(v)] && !seen[static_cast<size_t>(v)]) {
            seen[static_cast<size_t>(v)] = 1;
            stack.push_back(v);
        }
    }
    while (!stack.empty()) {
        Vertex v = stack.back();
        stack.pop_back();
        for (Vertex u : g.neighbors(v)) {
            if (!removed[static_cast<size_t>(u)] && !seen[static_cast<size_t>(u)]) {
                seen[static_cast<size_t>(u)] = 1;
                stack.push_back(u);
            }
        }
    }
    return seen;
}

bool interval_in(std::span<const Vertex> z_order, std::span<const Vertex> s) {
    if (s.empty())
        return true;
    std::vector<int> pos;
    pos.reserve(s.size());
    for (Vertex v : s) {
        auto it = std::find(z_order.begin(), z_order.end(), v);
        if (it == z_order.end())
            return false;
        pos.push_back(static_cast<int>(it - z_order.begin()));
    }
    auto [lo, hi] = std::minmax_element(pos.begin(), pos.end());
    return *hi - *lo + 1 == static_cast<int>(pos.size());
}

std::vector<Vertex> ball_cap_z(const Graph& g, Vertex v, Length d, std::span<const Vertex> z) {
    std::vector<Vertex> out;
    for (Vertex u : z)
        if (g.distance(v, u) <= d)
            out.push_back(u);
    return out;
}

// Unique argmin of distance-to-Z within members, or nullopt on a tie.
std::optional<Vertex> unique_root(const Graph& g, std::span<const Vertex> members,
                                  std::span<const Vertex> z, std::vector<Vertex>* ties = nullptr) {
    Length best = -1;
    std::vector<Vertex> argmins;
    for (Vertex v : members) {
        Length d = g.distance_to_set(v, z);
        if (argmins.empty() || d < best) {
            best = d;
            argmins.assign(1, v);
        } else if (d == best) {
            argmins.push_back(v);
        }
    }
    if (ties)
        *ties = argmins;
    if (argmins.size() == 1)
        return argmins.front();
    return std::nullopt;
}

} // namespace

ValidationReport validate_partition(const Graph& g, const ZvOrderedPartition& p) {
    check_vertices(g, p);
    ValidationReport r;
    const int n = g.vertex_count();

    // D2.5: the order on Z is an injection.
    {
        std::vector<Vertex> z = {p.z_order.begin(), p.z_order.end()};
        std::sort(z.begin(), z.end());
        auto dup = std::adjacent_find(z.begin(), z.end());
        if (dup != z.end())
            r.fail("D2.5", {*dup}, "vertex '" + g.name(*dup) + "' appears twice in the Z order");
    }
    if (p.z_order.empty())
        r.fail("D2.1", {}, "Z must be non-empty");

    // D2.1: subgraphs non-empty, duplicate-free, pairwise disjoint.
    std::vector<int> owner(static_cast<size_t>(n), -1);
    for (size_t i = 0; i < p.subgraphs.size(); ++i) {
        const auto& members = p.subgraphs[i].members;
        if (members.empty()) {
            r.fail("D2.1", {}, "V_" + std::to_string(i + 1) + " is empty");
            continue;
        }
        std::vector<Vertex> sorted = members;
        std::sort(sorted.begin(), sorted.end());
        auto dup = std::adjacent_find(sorted.begin(), sorted.end());
        if (dup != sorted.end())
            r.fail("D2.1", {*dup},
                   "vertex '" + g.name(*dup) + "' appears twice in V_" + std::to_string(i + 1));
        for (Vertex v : sorted) {
            int& o = owner[static_cast<size_t>(v)];
            if (o >= 0 && o != static_cast<int>(i))
                r.fail("D2.1", {v},
                       "vertex '" + g.name(v) + "' is in both V_" + std::to_string(o + 1) +
                           " and V_" + std::to_string(i + 1));
            o = static_cast<int>(i);
        }
    }

    // D2.2: cover plus a private vertex for every element of the sequence.
    std::vector<char> in_z(static_cast<size_t>(n), 0);
    for (Vertex z : p.z_order)
        in_z[static_cast<size_t>(z)] = 1;
    for (Vertex v = 0; v < n; ++v)
        if (!in_z[static_cast<size_t>(v)] && owner[static_cast<size_t>(v)] < 0)
            r.fail("D2.2", {v}, "vertex '" + g.name(v) + "' is covered by no element");
    bool z_private = false;
    for (Vertex z : p.z_order)
        if (owner[static_cast<size_t>(z)] < 0)
            z_private = true;
    if (!p.z_order.empty() && !z_private)
        r.fail("D2.2", {}, "dropping Z from the sequence still covers the vertex set");
    for (size_t i = 0; i < p.subgraphs.size(); ++i) {
        bool has_private = false;
        for (Vertex v : p.subgraphs[i].members)
            if (!in_z[static_cast<size_t>(v)] && owner[static_cast<size_t>(v)] == static_cast<int>(i))
                has_private = true;
        if (!p.subgraphs[i].members.empty() && !has_private)
            r.fail("D2.2", {},
                   "dropping V_" + std::to_string(i + 1) + " from the sequence still covers the vertex set");
    }

    if (p.z_order.empty())
        return r; // root and separator checks need Z

    // D2.3: unique root per subgraph, at distance <= 1 from Z.
    for (size_t i = 0; i < p.subgraphs.size(); ++i) {
        const auto& members = p.subgraphs[i].members;
        if (members.empty())
            continue;
        std::vector<Vertex> ties;
        auto root = unique_root(g, members, p.z_order, &ties);
        if (!root) {
            r.fail("D2.3", ties,
                   "V_" + std::to_string(i + 1) + " has several vertices closest to Z: " +
                       name_list(g, ties));
            continue;
        }
        if (g.distance_to_set(*root, p.z_order) > 1)
            r.fail("D2.3", {*root},
                   "root '" + g.name(*root) + "' of V_" + std::to_string(i + 1) +
                       " is at distance > 1 from Z");

        // D2.4: both separator checks.
        std::vector<char> in_vi(static_cast<size_t>(n), 0);
        for (Vertex v : members)
            in_vi[static_cast<size_t>(v)] = 1;

        std::vector<char> removed(static_cast<size_t>(n), 0);
        removed[static_cast<size_t>(*root)] = 1;
        std::vector<Vertex> inside;
        for (Vertex v : members)
            if (v != *root)
                inside.push_back(v);
        auto seen = reachable_without(g, inside, removed);
        for (Vertex u = 0; u < n; ++u) {
            if (seen[static_cast<size_t>(u)] && !in_vi[static_cast<size_t>(u)]) {
                r.fail("D2.4", {inside.empty() ? *root : inside.front(), u},
                       "a path from V_" + std::to_string(i + 1) + " to '" + g.name(u) +
                           "' avoids the root '" + g.name(*root) + "'");
                break;
            }
        }

        std::vector<char> removed_z(static_cast<size_t>(n), 0);
        for (Vertex z : p.z_order)
            removed_z[static_cast<size_t>(z)] = 1;
        std::vector<Vertex> inside_z;
        for (Vertex v : members)
            if (!removed_z[static_cast<size_t>(v)])
                inside_z.push_back(v);
        auto seen_z = reachable_without(g, inside_z, removed_z);
        for (Vertex u = 0; u < n; ++u) {
            if (seen_z[static_cast<size_t>(u)] && !in_vi[static_cast<size_t>(u)]) {
                r.fail("D2.4", {inside_z.empty() ? *root : inside_z.front(), u},
                       "a path from V_" + std::to_string(i + 1) + " to '" + g.name(u) +
                           "' avoids Z");
                break;
            }
        }
    }

    return r;
}

Vertex root_of(const Graph& g, const ZvOrderedPartition& p, int i) {
    check_vertices(g, p);
    if (i < 0 || static_cast<size_t>(i) >= p.subgraphs.size())
        throw Error(Errc::InvalidParameters, "subgraph index " + std::to_string(i) + " out of range");
    const auto& members = p.subgraphs[static_cast<size_t>(i)].members;
    if (members.empty() || p.z_order.empty())
        throw Error(Errc::InvalidParameters, "root of an empty subgraph or empty Z");
    std::vector<Vertex> ties;
    auto root = unique_root(g, members, p.z_order, &ties);
    if (!root)
        throw Error(Errc::AmbiguousRoot,
                    "V_" + std::to_string(i + 1) + " has tied closest vertices: " + name_list(g, ties));
    return *root;
}

bool is_interval(const ZvOrderedPartition& p, std::span<const Vertex> s) {
    for (Vertex v : s)
        if (std::find(p.z_order.begin(), p.z_order.end(), v) == p.z_order.end())
            throw Error(Errc::NotSubsetOfZ, "vertex index " + std::to_string(v) + " is not in Z");
    return interval_in(p.z_order, s);
}

namespace {

// Recursive worker for validate_zv_line. `context` prefixes messages so
// nested failures read like "V_2>V_1: ...". Witnesses stay ambient because
// nested partitions are expressed in ambient indices.
void check_zv_line(const Graph& ambient, const Graph& level, const std::vector<Vertex>& to_ambient,
                   const ZvOrderedPartition& p, const std::string& context, ValidationReport& r) {
    auto ambient_of = [&](Vertex v) { return to_ambient[static_cast<size_t>(v)]; };
    auto label = [&](const std::string& s) { return context.empty() ? s : context + ": " + s; };

    ValidationReport base = validate_partition(level, p);
    if (!base.valid) {
        for (ValidationFailure f : base.failures) {
            for (Vertex& w : f.witnesses)
                w = ambient_of(w);
            f.message = label(f.message);
            r.fail(std::move(f.condition), std::move(f.witnesses), std::move(f.message));
        }
        r.fail("D4.a", {}, label("the partition is not a ZV-ordered partition"));
        return;
    }

    // D4.b: radius-1 balls around Z-vertices cut Z in intervals.
    for (Vertex z : p.z_order) {
        auto cap = ball_cap_z(level, z, 1, p.z_order);
        if (!interval_in(p.z_order, cap)) {
            std::vector<Vertex> w;
            for (Vertex v : cap)
                w.push_back(ambient_of(v));
            r.fail("D4.b", w,
                   label("ball('" + level.name(z) + "',1) meets Z in a non-interval {" +
                         name_list(level, cap) + "}"));
        }
    }

    for (size_t i = 0; i < p.subgraphs.size(); ++i) {
        const SubgraphSpec& sub = p.subgraphs[i];
        Vertex root = root_of(level, p, static_cast<int>(i));
        std::string sub_name = "V_" + std::to_string(i + 1);

        // D4.e: the root's radius-1 ball also cuts Z in an interval.
        auto cap = ball_cap_z(level, root, 1, p.z_order);
        if (!interval_in(p.z_order, cap)) {
            std::vector<Vertex> w;
            for (Vertex v : cap)
                w.push_back(ambient_of(v));
            r.fail("D4.e", w,
                   label("ball of root '" + level.name(root) + "' of " + sub_name +
                         " meets Z in a non-interval"));
        }

        if (sub.members.size() == 1) {
            if (sub.nested) {
                // An explicit nested partition of a singleton must be the trivial one.
                if (sub.nested->z_order != sub.members || !sub.nested->subgraphs.empty())
                    r.fail("D4.c", {ambient_of(sub.members.front())},
                           label(sub_name + " is a singleton but its nested partition is not trivial"));
            }
            continue;
        }

        if (!sub.nested)
            throw Error(Errc::MissingNestedPartition,
                        label(sub_name + " has " + std::to_string(sub.members.size()) +
                              " vertices but no nested partition"));

        // The nested partition may refer only to members.
        std::vector<Vertex> members_sorted = sub.members;
        std::sort(members_sorted.begin(), members_sorted.end());
        bool references_ok = true;
        {
            std::vector<Vertex> referenced;
            auto collect = [&](auto&& self, const ZvOrderedPartition& q) -> void {
                referenced.insert(referenced.end(), q.z_order.begin(), q.z_order.end());
                for (const auto& s : q.subgraphs) {
                    referenced.insert(referenced.end(), s.members.begin(), s.members.end());
                    if (s.nested)
                        self(self, *s.nested);
                }
            };
            collect(collect, *sub.nested);
            for (Vertex v : referenced) {
                if (!std::binary_search(members_sorted.begin(), members_sorted.end(), v)) {
                    r.fail("D4.c", {ambient_of(v)},
                           label(sub_name + "'s nested partition references '" + level.name(v) +
                                 "' outside its members"));
                    references_ok = false;
                }
            }
        }
        if (!references_ok)
            continue;

        // D4.c: the induced graph is recursively a ZV-line graph.
        std::optional<Graph> induced_holder;
        try {
            induced_holder.emplace(level.induced(members_sorted));
        } catch (const Error& e) {
            if (e.code() != Errc::Disconnected)
                throw;
            r.fail("D4.c", {ambient_of(members_sorted.front())},
                   label(sub_name + " induces a disconnected graph"));
            continue;
        }
        const Graph& induced = *induced_holder;

        // Translate the nested partition from level indices to induced indices.
        auto to_induced = [&](Vertex level_v) {
            auto it = std::lower_bound(members_sorted.begin(), members_sorted.end(), level_v);
            return static_cast<Vertex>(it - members_sorted.begin());
        };
        std::vector<Vertex> induced_to_ambient(members_sorted.size());
        for (size_t j = 0; j < members_sorted.size(); ++j)
            induced_to_ambient[j] = ambient_of(members_sorted[j]);
        auto translate = [&](auto&& self, const ZvOrderedPartition& q) -> ZvOrderedPartition {
            ZvOrderedPartition out;
            for (Vertex z : q.z_order)
                out.z_order.push_back(to_induced(z));
            for (const auto& s : q.subgraphs) {
                SubgraphSpec t;
                for (Vertex v : s.members)
                    t.members.push_back(to_induced(v));
                if (s.nested)
                    t.nested = self(self, *s.nested);
                out.subgraphs.push_back(std::move(t));
            }
            return out;
        };
        ZvOrderedPartition nested_local = translate(translate, *sub.nested);

        // D4.d: the root is the nested partition's leftmost Z-vertex.
        if (nested_local.z_order.empty() || induced_to_ambient[static_cast<size_t>(
                                                nested_local.z_order.front())] != ambient_of(root)) {
            r.fail("D4.d", {ambient_of(root)},
                   label("root '" + level.name(root) + "' is not the leftmost Z-vertex of " +
                         sub_name + "'s nested partition"));
        }

        check_zv_line(ambient, induced, induced_to_ambient, nested_local,
                      context.empty() ? sub_name : context + ">" + sub_name, r);
    }
}

} // namespace

ValidationReport validate_zv_line(const Graph& g, const ZvOrderedPartition& p) {
    check_vertices(g, p);
    ValidationReport r;
    if (!g.unit_lengths())
        r.fail("UnitLengthsRequired", {}, "ZV-line graphs are defined for unit edge lengths only");
    std::vector<Vertex> identity(static_cast<size_t>(g.vertex_count()));
    for (Vertex v = 0; v < g.vertex_count(); ++v)
        identity[static_cast<size_t>(v)] = v;
    check_zv_line(g, g, identity, p, "", r);
    return r;
}

ValidationReport ball_interval_check(const Graph& g, const ZvOrderedPartition& p) {
    check_vertices(g, p);
    ValidationReport r;
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
        for (Length d = 0; d <= g.diameter(); ++d) {
            auto cap = ball_cap_z(g, v, d, p.z_order);
            if (!interval_in(p.z_order, cap)) {
                r.fail("D4.b", cap,
                       "ball('" + g.name(v) + "'," + std::to_string(d) +
                           ") meets Z in a non-interval {" + name_list(g, cap) + "}");
                return r;
            }
        }
    }
    return r;
}

} // namespace zvl
