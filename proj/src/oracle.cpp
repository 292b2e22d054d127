#include "zvl/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace zvl {

const char* property_class_name(PropertyClass c) {
    switch (c) {
    case PropertyClass::Misreport: return "misreport";
    case PropertyClass::Abstention: return "abstention";
    case PropertyClass::FalseName: return "falsename";
    case PropertyClass::Group: return "group";
    }
    return "?";
}

PropertyClass classify_deviation(size_t coalition_size, size_t replacement_size) {
    if (coalition_size != 1)
        return PropertyClass::Group;
    if (replacement_size == 0)
        return PropertyClass::Abstention;
    if (replacement_size == 1)
        return PropertyClass::Misreport;
    return PropertyClass::FalseName;
}

std::vector<std::vector<Vertex>> multisets_of_size(int vertex_count, int size) {
    std::vector<std::vector<Vertex>> out;
    std::vector<Vertex> current;
    auto rec = [&](auto&& self, Vertex from, int remaining) -> void {
        if (remaining == 0) {
            out.push_back(current);
            return;
        }
        for (Vertex v = from; v < vertex_count; ++v) {
            current.push_back(v);
            self(self, v, remaining - 1);
            current.pop_back();
        }
    };
    rec(rec, 0, size);
    return out;
}

std::vector<std::vector<Vertex>> sub_multisets(std::span<const Vertex> sorted_multiset) {
    // Distinct values with multiplicities, then pick 0..count of each.
    std::vector<std::pair<Vertex, int>> groups;
    for (Vertex v : sorted_multiset) {
        if (!groups.empty() && groups.back().first == v)
            ++groups.back().second;
        else
            groups.emplace_back(v, 1);
    }
    std::vector<std::vector<Vertex>> out;
    std::vector<Vertex> current;
    auto rec = [&](auto&& self, size_t gi) -> void {
        if (gi == groups.size()) {
            out.push_back(current);
            return;
        }
        for (int take = 0; take <= groups[gi].second; ++take) {
            for (int t = 0; t < take; ++t)
                current.push_back(groups[gi].first);
            self(self, gi + 1);
            for (int t = 0; t < take; ++t)
                current.pop_back();
        }
    };
    rec(rec, 0);
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.size() != b.size())
            return a.size() < b.size();
        return a < b;
    });
    return out;
}

namespace {

unsigned long long multiset_count(int vertex_count, int size) {
    // C(vertex_count + size - 1, size)
    unsigned long long r = 1;
    for (int i = 1; i <= size; ++i)
        r = r * static_cast<unsigned long long>(vertex_count - 1 + i) /
            static_cast<unsigned long long>(i);
    return r;
}

// Sizes of A admitted for a coalition of the given size.
std::vector<int> allowed_replacement_sizes(const PropertyClassSet& classes, size_t coalition_size,
                                           int cap) {
    std::vector<int> sizes;
    for (int t = 0; t <= cap; ++t)
        if (classes.allows(coalition_size, static_cast<size_t>(t)))
            sizes.push_back(t);
    return sizes;
}

std::vector<Vertex> multiset_minus(std::span<const Vertex> x, std::span<const Vertex> c) {
    std::vector<Vertex> out;
    out.reserve(x.size());
    size_t j = 0;
    for (Vertex v : x) {
        if (j < c.size() && c[j] == v)
            ++j;
        else
            out.push_back(v);
    }
    return out;
}

bool is_sub_multiset(std::span<const Vertex> c, std::span<const Vertex> x) {
    size_t j = 0;
    for (Vertex v : c) {
        while (j < x.size() && x[j] < v)
            ++j;
        if (j == x.size() || x[j] != v)
            return false;
        ++j;
    }
    return true;
}

struct VertexVecHash {
    size_t operator()(const std::vector<Vertex>& v) const noexcept {
        size_t h = 1469598103934665603ULL;
        for (Vertex x : v) {
            h ^= static_cast<size_t>(x) + 0x9e3779b9;
            h *= 1099511628211ULL;
        }
        return h;
    }
};

// Outcomes for every ballot multiset up to the deviated-profile size.
// Read-only during the sweep, so workers share it freely. -1 marks profiles
// the mechanism rejects (an empty list for median and friends).
class OutcomeTable {
public:
    OutcomeTable(const Mechanism& m, int max_size) {
        const int n = m.graph().vertex_count();
        for (int size = 0; size <= max_size; ++size) {
            for (auto& ms : multisets_of_size(n, size)) {
                Vertex out = -1;
                try {
                    out = m.run(Profile(ms)).vertex;
                } catch (const Error& e) {
                    if (e.code() != Errc::EmptyProfile)
                        throw;
                }
                table_.emplace(std::move(ms), out);
            }
        }
    }

    Vertex outcome(const std::vector<Vertex>& multiset) const {
        auto it = table_.find(multiset);
        return it == table_.end() ? -1 : it->second;
    }

private:
    std::unordered_map<std::vector<Vertex>, Vertex, VertexVecHash> table_;
};

std::optional<Counterexample> beneficial(const Graph& g, std::span<const Vertex> coalition,
                                         Vertex before, Vertex after) {
    if (before < 0 || after < 0 || before == after || coalition.empty())
        return std::nullopt;
    bool strict = false;
    std::vector<MemberDelta> deltas;
    deltas.reserve(coalition.size());
    for (Vertex member : coalition) {
        Length db = g.distance(member, before);
        Length da = g.distance(member, after);
        if (da > db)
            return std::nullopt;
        if (da < db)
            strict = true;
        deltas.push_back({member, db, da});
    }
    if (!strict)
        return std::nullopt;
    Counterexample cex;
    cex.outcome_before = before;
    cex.outcome_after = after;
    cex.member_deltas = std::move(deltas);
    return cex;
}

} // namespace

std::optional<Counterexample> check_deviation(const Mechanism& m, const DeviationQuery& q) {
    const Graph& g = m.graph();

    if (!q.true_sequence.empty()) {
        // Sequence semantics: deviated profile is A followed by the
        // non-coalition ballots in their original order.
        for (int pos : q.coalition_positions)
            if (pos < 0 || static_cast<size_t>(pos) >= q.true_sequence.size())
                throw Error(Errc::InvalidParameters, "coalition position out of range");
        std::vector<char> in_coalition(q.true_sequence.size(), 0);
        for (int pos : q.coalition_positions)
            in_coalition[static_cast<size_t>(pos)] = 1;
        std::vector<Vertex> deviated = q.replacement;
        std::vector<Vertex> members;
        for (size_t i = 0; i < q.true_sequence.size(); ++i) {
            if (in_coalition[i])
                members.push_back(q.true_sequence[i]);
            else
                deviated.push_back(q.true_sequence[i]);
        }
        Vertex before = m.run_sequence(q.true_sequence).vertex;
        Vertex after = -1;
        try {
            after = m.run_sequence(deviated).vertex;
        } catch (const Error& e) {
            if (e.code() != Errc::EmptyProfile)
                throw;
            return std::nullopt;
        }
        auto cex = beneficial(g, members, before, after);
        if (!cex)
            return std::nullopt;
        cex->query = q;
        return cex;
    }

    std::vector<Vertex> coalition = q.coalition;
    std::vector<Vertex> replacement = q.replacement;
    std::sort(coalition.begin(), coalition.end());
    std::sort(replacement.begin(), replacement.end());

    if (!is_sub_multiset(coalition, q.true_profile.ballots()))
        throw Error(Errc::InvalidParameters, "coalition is not a sub-multiset of the profile");
    if (classify_deviation(coalition.size(), replacement.size()) != q.property_class &&
        !(q.property_class == PropertyClass::Group && !coalition.empty()))
        throw Error(Errc::InvalidParameters, "query shape does not match its property class");

    if (coalition.empty())
        return std::nullopt;

    Vertex before = m.run(q.true_profile).vertex;
    std::vector<Vertex> rest = multiset_minus(q.true_profile.ballots(), coalition);
    std::vector<Vertex> deviated;
    deviated.reserve(rest.size() + replacement.size());
    std::merge(rest.begin(), rest.end(), replacement.begin(), replacement.end(),
               std::back_inserter(deviated));
    Vertex after = -1;
    try {
        after = m.run(Profile(deviated)).vertex;
    } catch (const Error& e) {
        if (e.code() != Errc::EmptyProfile)
            throw;
        return std::nullopt;
    }
    auto cex = beneficial(g, coalition, before, after);
    if (!cex)
        return std::nullopt;
    cex->query = q;
    cex->query.coalition = std::move(coalition);
    cex->query.replacement = std::move(replacement);
    return cex;
}

unsigned long long deviation_search_space(int vertex_count, const CertificationConfig& cfg) {
    unsigned long long total = 0;
    for (int n = 1; n <= cfg.max_agents; ++n) {
        for (auto& x : multisets_of_size(vertex_count, n)) {
            for (auto& c : sub_multisets(x)) {
                if (c.empty())
                    continue;
                for (int t : allowed_replacement_sizes(cfg.property_classes, c.size(),
                                                       cfg.ballot_cap))
                    total += multiset_count(vertex_count, t);
            }
        }
    }
    return total;
}

namespace {

struct SweepResult {
    std::vector<Counterexample> counterexamples;
    unsigned long long examined = 0;
};

// Scans one true profile against every admissible (coalition, replacement)
// pair. Pure: reads only the outcome table and the distance table.
SweepResult sweep_profile(const Graph& g, const OutcomeTable& outcomes,
                          const std::vector<Vertex>& x, const CertificationConfig& cfg,
                          const std::vector<std::vector<std::vector<Vertex>>>& replacements_by_size,
                          bool stop_at_first) {
    SweepResult result;
    Vertex before = outcomes.outcome(x);
    if (before < 0)
        return result;
    for (auto& coalition : sub_multisets(x)) {
        if (coalition.empty())
            continue;
        std::vector<Vertex> rest = multiset_minus(x, coalition);
        for (int t : allowed_replacement_sizes(cfg.property_classes, coalition.size(),
                                               cfg.ballot_cap)) {
            for (auto& a : replacements_by_size[static_cast<size_t>(t)]) {
                ++result.examined;
                std::vector<Vertex> deviated;
                deviated.reserve(rest.size() + a.size());
                std::merge(rest.begin(), rest.end(), a.begin(), a.end(),
                           std::back_inserter(deviated));
                Vertex after = outcomes.outcome(deviated);
                auto cex = beneficial(g, coalition, before, after);
                if (cex) {
                    cex->query.true_profile = Profile(x);
                    cex->query.coalition = coalition;
                    cex->query.replacement = a;
                    cex->query.property_class = classify_deviation(coalition.size(), a.size());
                    result.counterexamples.push_back(std::move(*cex));
                    if (stop_at_first)
                        return result;
                }
            }
        }
    }
    return result;
}

std::vector<std::vector<Vertex>> all_profiles(int vertex_count, int max_agents) {
    std::vector<std::vector<Vertex>> profiles;
    for (int n = 1; n <= max_agents; ++n) {
        auto chunk = multisets_of_size(vertex_count, n);
        profiles.insert(profiles.end(), std::make_move_iterator(chunk.begin()),
                        std::make_move_iterator(chunk.end()));
    }
    return profiles;
}

unsigned long long sequence_search_space(int vertex_count, const CertificationConfig& cfg) {
    auto pow_v = [&](int t) {
        unsigned long long r = 1;
        for (int i = 0; i < t; ++i)
            r *= static_cast<unsigned long long>(vertex_count);
        return r;
    };
    unsigned long long total = 0;
    for (int n = 1; n <= cfg.max_agents; ++n) {
        unsigned long long per_profile = 0;
        for (int c = 1; c <= n; ++c) {
            unsigned long long masks = 1; // C(n, c)
            for (int i = 1; i <= c; ++i)
                masks = masks * static_cast<unsigned long long>(n - c + i) /
                        static_cast<unsigned long long>(i);
            for (int t : allowed_replacement_sizes(cfg.property_classes, static_cast<size_t>(c),
                                                   cfg.ballot_cap))
                per_profile += masks * pow_v(t);
        }
        total += pow_v(n) * per_profile;
    }
    return total;
}

void guard_budget(const Mechanism& m, const CertificationConfig& cfg) {
    unsigned long long space = m.anonymous()
                                   ? deviation_search_space(m.graph().vertex_count(), cfg)
                                   : sequence_search_space(m.graph().vertex_count(), cfg);
    if (space > cfg.eval_budget)
        throw Error(Errc::SearchSpaceTooLarge,
                    "the configured caps need " + std::to_string(space) +
                        " mechanism evaluations (budget " + std::to_string(cfg.eval_budget) + ")");
}

int resolve_jobs(int jobs) {
#ifdef _OPENMP
    if (jobs <= 0)
        return omp_get_max_threads();
    return jobs;
#else
    (void)jobs;
    return 1;
#endif
}

// Sequence-space sweep for the dictator: raw profiles, coalitions as
// position sets, ordered replacements prepended to the remaining ballots.
std::vector<Counterexample> sweep_sequences(const Mechanism& m, const CertificationConfig& cfg,
                                            unsigned long long* examined, bool stop_at_first) {
    const Graph& g = m.graph();
    const int nv = g.vertex_count();
    std::vector<Counterexample> found;

    std::vector<std::vector<std::vector<Vertex>>> seqs_by_size(
        static_cast<size_t>(std::max(cfg.max_agents, cfg.ballot_cap)) + 1);
    seqs_by_size[0] = {{}};
    for (size_t t = 1; t < seqs_by_size.size(); ++t) {
        for (const auto& shorter : seqs_by_size[t - 1]) {
            for (Vertex v = 0; v < nv; ++v) {
                auto seq = shorter;
                seq.push_back(v);
                seqs_by_size[t].push_back(std::move(seq));
            }
        }
    }

    for (int n = 1; n <= cfg.max_agents; ++n) {
        for (const auto& x : seqs_by_size[static_cast<size_t>(n)]) {
            Vertex before = m.run_sequence(x).vertex;
            // Position subsets by increasing size, then lexicographic.
            std::vector<std::vector<int>> position_sets;
            for (unsigned mask = 1; mask < (1u << n); ++mask) {
                std::vector<int> positions;
                for (int i = 0; i < n; ++i)
                    if (mask & (1u << i))
                        positions.push_back(i);
                position_sets.push_back(std::move(positions));
            }
            std::stable_sort(position_sets.begin(), position_sets.end(),
                             [](const auto& a, const auto& b) {
                                 if (a.size() != b.size())
                                     return a.size() < b.size();
                                 return a < b;
                             });
            for (const auto& positions : position_sets) {
                for (int t : allowed_replacement_sizes(cfg.property_classes, positions.size(),
                                                       cfg.ballot_cap)) {
                    for (const auto& a : seqs_by_size[static_cast<size_t>(t)]) {
                        ++*examined;
                        std::vector<Vertex> deviated = a;
                        std::vector<Vertex> members;
                        size_t pi = 0;
                        for (int i = 0; i < n; ++i) {
                            if (pi < positions.size() && positions[pi] == i) {
                                members.push_back(x[static_cast<size_t>(i)]);
                                ++pi;
                            } else {
                                deviated.push_back(x[static_cast<size_t>(i)]);
                            }
                        }
                        Vertex after = -1;
                        try {
                            after = m.run_sequence(deviated).vertex;
                        } catch (const Error& e) {
                            if (e.code() != Errc::EmptyProfile)
                                throw;
                        }
                        auto cex = beneficial(g, members, before, after);
                        if (cex) {
                            cex->query.true_sequence = x;
                            cex->query.coalition_positions = positions;
                            cex->query.replacement = a;
                            cex->query.property_class =
                                classify_deviation(positions.size(), a.size());
                            found.push_back(std::move(*cex));
                            if (stop_at_first)
                                return found;
                        }
                    }
                }
            }
        }
    }
    return found;
}

} // namespace

std::optional<Counterexample> find_deviation(const Mechanism& m, const CertificationConfig& cfg) {
    guard_budget(m, cfg);
    unsigned long long examined = 0;
    if (!m.anonymous()) {
        auto found = sweep_sequences(m, cfg, &examined, /*stop_at_first=*/true);
        if (found.empty())
            return std::nullopt;
        return found.front();
    }
    const Graph& g = m.graph();
    int max_size = std::max(cfg.max_agents, cfg.max_agents - 1 + cfg.ballot_cap);
    OutcomeTable outcomes(m, max_size);
    std::vector<std::vector<std::vector<Vertex>>> replacements_by_size;
    for (int t = 0; t <= cfg.ballot_cap; ++t)
        replacements_by_size.push_back(multisets_of_size(g.vertex_count(), t));
    for (auto& x : all_profiles(g.vertex_count(), cfg.max_agents)) {
        auto r = sweep_profile(g, outcomes, x, cfg, replacements_by_size, /*stop_at_first=*/true);
        if (!r.counterexamples.empty())
            return r.counterexamples.front();
    }
    return std::nullopt;
}

CertificationReport certify(const Mechanism& m, const CertificationConfig& cfg) {
    auto start = std::chrono::steady_clock::now();
    guard_budget(m, cfg);

    CertificationReport report;
    const Graph& g = m.graph();

    if (!m.anonymous()) {
        report.counterexamples = sweep_sequences(m, cfg, &report.search_space_size,
                                                 /*stop_at_first=*/false);
    } else {
        int max_size = std::max(cfg.max_agents, cfg.max_agents - 1 + cfg.ballot_cap);
        OutcomeTable outcomes(m, max_size);
        std::vector<std::vector<std::vector<Vertex>>> replacements_by_size;
        for (int t = 0; t <= cfg.ballot_cap; ++t)
            replacements_by_size.push_back(multisets_of_size(g.vertex_count(), t));
        auto profiles = all_profiles(g.vertex_count(), cfg.max_agents);

        std::vector<SweepResult> results(profiles.size());
        const int jobs = resolve_jobs(cfg.jobs);
        if (jobs > 1) {
            // The enumeration is partitioned across workers; per-profile
            // results are merged in canonical order below, so the report does
            // not depend on the worker count.
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
#endif
            for (long long i = 0; i < static_cast<long long>(profiles.size()); ++i)
                results[static_cast<size_t>(i)] =
                    sweep_profile(g, outcomes, profiles[static_cast<size_t>(i)], cfg,
                                  replacements_by_size, false);
        } else {
            for (size_t i = 0; i < profiles.size(); ++i)
                results[i] = sweep_profile(g, outcomes, profiles[i], cfg, replacements_by_size,
                                           false);
        }
        for (auto& r : results) {
            report.search_space_size += r.examined;
            report.counterexamples.insert(report.counterexamples.end(),
                                          std::make_move_iterator(r.counterexamples.begin()),
                                          std::make_move_iterator(r.counterexamples.end()));
        }
    }
    report.certified = report.counterexamples.empty();

    // Property suites over the same profile space.
    auto profiles = all_profiles(g.vertex_count(), cfg.max_agents);
    std::vector<char> reached(static_cast<size_t>(g.vertex_count()), 0);
    for (const auto& x : profiles) {
        Vertex out;
        try {
            out = m.run(Profile(x)).vertex;
        } catch (const Error& e) {
            if (e.code() != Errc::EmptyProfile)
                throw;
            continue;
        }
        reached[static_cast<size_t>(out)] = 1;

        auto po = pareto_set(g, Profile(x));
        if (!std::binary_search(po.begin(), po.end(), out)) {
            report.property_failures.push_back(
                {"pareto", "outcome '" + g.name(out) + "' is Pareto dominated for some profile"});
            break;
        }
    }
    if (m.anonymous()) {
        for (const auto& x : profiles) {
            std::vector<Vertex> reversed(x.rbegin(), x.rend());
            std::vector<Vertex> rotated = x;
            if (!rotated.empty())
                std::rotate(rotated.begin(), rotated.begin() + 1, rotated.end());
            Vertex a = m.run_sequence(x).vertex;
            if (m.run_sequence(reversed).vertex != a || m.run_sequence(rotated).vertex != a) {
                report.property_failures.push_back(
                    {"anonymity", "outcome depends on ballot order for some profile"});
                break;
            }
        }
    }
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
        for (int n = 1; n <= cfg.max_agents; ++n) {
            std::vector<Vertex> unanimous(static_cast<size_t>(n), v);
            Vertex out = m.run_sequence(unanimous).vertex;
            if (out != v) {
                report.property_failures.push_back(
                    {"unanimity", "unanimous profile on '" + g.name(v) + "' yields '" +
                                      g.name(out) + "'"});
                n = cfg.max_agents; // one failure per vertex is enough
            }
        }
    }
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
        if (!reached[static_cast<size_t>(v)]) {
            report.property_failures.push_back(
                {"onto", "no profile at the caps yields '" + g.name(v) + "'"});
            break;
        }
    }
    if (const FStar* fs = m.fstar()) {
        for (const auto& f : fs->root_saturation_failures(cfg.tau_list)) {
            report.property_failures.push_back(
                {"root-saturation", f.subgraph + " with every location voted " +
                                        std::to_string(f.tau) + " times yields '" +
                                        g.name(f.got) + "' instead of its root '" +
                                        g.name(f.expected_root) + "'"});
        }
    }

    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

std::string format_counterexample(const Graph& g, const Counterexample& cex) {
    auto names = [&](std::span<const Vertex> vs) {
        std::string s;
        for (Vertex v : vs) {
            if (!s.empty())
                s += ",";
            s += g.name(v);
        }
        return s.empty() ? std::string("-") : s;
    };
    std::string line = "counterexample class=";
    line += property_class_name(cex.query.property_class);
    if (!cex.query.true_sequence.empty()) {
        line += " profile=" + names(cex.query.true_sequence);
        std::string pos;
        for (int p : cex.query.coalition_positions) {
            if (!pos.empty())
                pos += ",";
            pos += std::to_string(p + 1);
        }
        line += " coalition_positions=" + pos;
    } else {
        line += " profile=" + names(cex.query.true_profile.ballots());
        line += " coalition=" + names(cex.query.coalition);
    }
    line += " replacement=" + names(cex.query.replacement);
    line += " before=" + g.name(cex.outcome_before);
    line += " after=" + g.name(cex.outcome_after);
    line += " deltas=";
    for (size_t i = 0; i < cex.member_deltas.size(); ++i) {
        if (i)
            line += ",";
        line += std::to_string(cex.member_deltas[i].before) + ":" +
                std::to_string(cex.member_deltas[i].after);
    }
    return line;
}

} // namespace zvl
