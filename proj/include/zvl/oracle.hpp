#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zvl/mechanism.hpp"

namespace zvl {

enum class PropertyClass { Misreport, Abstention, FalseName, Group };

const char* property_class_name(PropertyClass c);

/// Which deviation shapes to search. Group subsumes the three singleton
/// classes.
struct PropertyClassSet {
    bool misreport = false;
    bool abstention = false;
    bool falsename = false;
    bool group = false;

    static PropertyClassSet only(PropertyClass c) {
        PropertyClassSet s;
        switch (c) {
        case PropertyClass::Misreport: s.misreport = true; break;
        case PropertyClass::Abstention: s.abstention = true; break;
        case PropertyClass::FalseName: s.falsename = true; break;
        case PropertyClass::Group: s.group = true; break;
        }
        return s;
    }

    bool allows(size_t coalition_size, size_t replacement_size) const {
        if (group && coalition_size >= 1)
            return true;
        if (coalition_size != 1)
            return false;
        if (replacement_size == 0)
            return abstention;
        if (replacement_size == 1)
            return misreport;
        return falsename;
    }
};

/// The shape a concrete (C, A) pair falls into.
PropertyClass classify_deviation(size_t coalition_size, size_t replacement_size);

/// One candidate deviation. For anonymous mechanisms the profile and the
/// coalition are multisets; dictator audits carry the raw sequence and
/// coalition positions instead.
struct DeviationQuery {
    Profile true_profile;
    std::vector<Vertex> coalition;   // sorted sub-multiset of the profile
    std::vector<Vertex> replacement; // sorted multiset A
    PropertyClass property_class = PropertyClass::Group;

    std::vector<Vertex> true_sequence;   // non-empty for sequence audits
    std::vector<int> coalition_positions; // 0-based, used with true_sequence
};

struct MemberDelta {
    Vertex location = -1;
    Length before = 0;
    Length after = 0;
};

/// A certified beneficial deviation: every member's true distance is
/// non-increasing and at least one strictly decreases.
struct Counterexample {
    DeviationQuery query;
    Vertex outcome_before = -1;
    Vertex outcome_after = -1;
    std::vector<MemberDelta> member_deltas;
};

struct CertificationConfig {
    int max_agents = 3;
    int ballot_cap = 3;
    std::vector<int> tau_list = {1, 2, 3};
    PropertyClassSet property_classes = PropertyClassSet::only(PropertyClass::Group);
    // Refuse configurations whose class count exceeds this many mechanism
    // evaluations instead of running unbounded.
    unsigned long long eval_budget = 100'000'000ULL;
    int jobs = 1; // 0 = all hardware threads
};

struct PropertyFailure {
    std::string suite; // "anonymity", "pareto", "unanimity", "onto", "root-saturation"
    std::string detail;
};

struct CertificationReport {
    bool certified = true; // no deviation counterexamples at the caps
    std::vector<Counterexample> counterexamples;
    std::vector<PropertyFailure> property_failures;
    unsigned long long search_space_size = 0;
    double seconds = 0.0;

    bool ok() const { return certified && property_failures.empty(); }
};

/// Evaluates one query exactly. Mechanisms that reject the deviated profile
/// (an empty ballot list for median and friends) yield no counterexample.
std::optional<Counterexample> check_deviation(const Mechanism& m, const DeviationQuery& q);

/// Scans the canonical enumeration (profiles by size then lex, coalitions by
/// size then lex, replacements by size then lex) and returns the first
/// counterexample, or nothing when the caps are clean.
std::optional<Counterexample> find_deviation(const Mechanism& m, const CertificationConfig& cfg);

/// Full sweep plus the anonymity / Pareto / unanimity / onto suites and, for
/// F*, the root-saturation probe for each tau. Does not stop at the first
/// finding; reports are byte-identical for any job count.
CertificationReport certify(const Mechanism& m, const CertificationConfig& cfg);

// Canonical enumeration building blocks (each anonymity class exactly once).
std::vector<std::vector<Vertex>> multisets_of_size(int vertex_count, int size);
std::vector<std::vector<Vertex>> sub_multisets(std::span<const Vertex> sorted_multiset);
unsigned long long deviation_search_space(int vertex_count, const CertificationConfig& cfg);

std::string format_counterexample(const Graph& g, const Counterexample& cex);

} // namespace zvl
