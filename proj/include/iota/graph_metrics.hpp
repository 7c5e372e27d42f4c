#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "iota/reasoner.hpp"

namespace iota {

// Condensed attack trace: one bit per vulnerability in the universe.
class Cat {
public:
    Cat() = default;
    explicit Cat(std::size_t universe);
    static Cat single(std::size_t universe, std::size_t bit);

    std::size_t universe() const { return universe_; }
    bool test(std::size_t bit) const;
    void set(std::size_t bit);
    std::size_t count() const;
    bool is_zero() const { return count() == 0; }
    std::vector<std::size_t> bits() const;
    bool subset_of(const Cat& other) const;

    Cat operator|(const Cat& other) const;
    bool operator==(const Cat&) const = default;
    std::strong_ordering operator<=>(const Cat& other) const;

    // "[1010]", bit 0 first
    std::string to_string() const;

private:
    // Universes up to 128 vulnerabilities stay off the heap.
    static constexpr std::size_t kInlineWords = 2;

    std::size_t word_count() const { return (universe_ + 63) / 64; }
    const std::uint64_t* words() const { return heap_.empty() ? small_.data() : heap_.data(); }
    std::uint64_t* words() { return heap_.empty() ? small_.data() : heap_.data(); }

    std::size_t universe_ = 0;
    std::array<std::uint64_t, kInlineWords> small_{};
    std::vector<std::uint64_t> heap_;
};

inline constexpr std::size_t kDefaultCatCap = 4096;

// Sorted, duplicate-free set of CATs.
class AttackEvidence {
public:
    AttackEvidence() = default;
    explicit AttackEvidence(std::vector<Cat> cats);

    const std::vector<Cat>& cats() const { return cats_; }
    std::size_t size() const { return cats_.size(); }
    bool empty() const { return cats_.empty(); }
    bool contains(const Cat& cat) const;
    bool operator==(const AttackEvidence&) const = default;

private:
    std::vector<Cat> cats_;
};

// Set union. Throws MetricsError on a universe mismatch.
AttackEvidence merge_ae_or(const AttackEvidence& a, const AttackEvidence& b);
// Pairwise OR of every CAT pair. Throws MetricsError on a universe mismatch
// or when the result would hold more than `cap` CATs.
AttackEvidence merge_ae_and(const AttackEvidence& a, const AttackEvidence& b, std::size_t cap = kDefaultCatCap);

struct VulnUniverse {
    std::vector<std::string> cves;           // bit index -> cve id
    std::map<std::string, std::size_t> bit;  // cve id -> bit index
};

// Vulnerabilities in order of first vulExists fact node.
VulnUniverse vulnerability_universe(const AttackGraph& graph);

struct EvidenceResult {
    VulnUniverse universe;
    std::vector<AttackEvidence> evidence;  // per node id
    std::size_t updates = 0;
};

EvidenceResult attack_evidence(const AttackGraph& graph, std::size_t cap = kDefaultCatCap);

// cve id -> derivation nodes reachable by exploiting only that cve.
using BlastRadius = std::map<std::string, std::vector<std::size_t>>;
BlastRadius blast_radius(const AttackGraph& graph, const EvidenceResult& evidence);
// True when a's radius is a superset of b's.
bool br_dominates(const BlastRadius& br, const std::string& a, const std::string& b);

inline constexpr std::size_t kUnreachable = std::numeric_limits<std::size_t>::max();

// Shortest depth of every node: leaves 0, OR nodes 1 + min, AND nodes
// 1 + max over parents. Unreachable nodes get kUnreachable.
std::vector<std::size_t> compute_depths(const AttackGraph& graph);

struct TraceNode {
    std::size_t node = 0;
    std::vector<std::size_t> preds;  // one parent for OR nodes, all for AND nodes
};

struct AttackTrace {
    std::size_t goal = 0;
    std::size_t depth = 0;
    std::vector<TraceNode> nodes;  // parents before children, goal last
};

AttackTrace shortest_trace(const AttackGraph& graph, std::size_t goal, const std::vector<std::size_t>& depths);
AttackTrace shortest_trace(const AttackGraph& graph, std::size_t goal);

struct PatchSet {
    bool patchable = true;  // false when some CAT is empty
    std::vector<std::string> cves;
};

// Greedy hitting set over the CATs, most-hitting vulnerability first, ties
// by cve id.
PatchSet minimal_patch_set(const AttackEvidence& goal_evidence, const VulnUniverse& universe);

struct TraceStep {
    std::size_t rule_node = 0;
    std::string rule;
    Atom derives;
};

struct GoalReport {
    std::size_t node = 0;
    Atom goal;
    std::size_t depth = 0;
    AttackTrace trace;
    std::vector<TraceStep> steps;
    PatchSet patch;

    bool operator==(const GoalReport& other) const;
};

std::vector<TraceStep> trace_steps(const AttackGraph& graph, const AttackTrace& trace);

// Per-goal trace and patch set for every goal node of the graph.
std::vector<GoalReport> analyze_goals_serial(const AttackGraph& graph, const EvidenceResult& evidence,
                                             const std::vector<std::size_t>& depths);
// Same result, goals processed in parallel.
std::vector<GoalReport> analyze_goals(const AttackGraph& graph, const EvidenceResult& evidence,
                                      const std::vector<std::size_t>& depths, int jobs = 0);

struct MetricsReport {
    std::vector<GoalReport> goals;
    BlastRadius radius;
    EvidenceResult evidence;
};

MetricsReport compute_metrics(const AttackGraph& graph, int jobs = 0, std::size_t cap = kDefaultCatCap);

// "CVE-2018-3904 (9)"
std::string radius_display(const std::string& cve, std::size_t cardinality);

std::string metrics_to_json(const AttackGraph& graph, const MetricsReport& report);
std::string metrics_to_text(const AttackGraph& graph, const MetricsReport& report);

}  // namespace iota
