#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "iota/logic.hpp"

namespace iota {

struct Firing {
    std::size_t rule = 0;               // index into LogicProgram::rules
    std::vector<std::size_t> body;      // fact ids, in body order
    std::size_t head = 0;               // fact id
};

struct SaturationResult {
    std::vector<Atom> facts;            // fact id -> ground atom
    std::vector<std::size_t> birth;     // round in which the fact appeared (0 = input)
    std::vector<Firing> firings;        // every distinct body combination, in evaluation order
    std::size_t rounds = 0;
    std::map<Atom, std::size_t> index;  // atom -> fact id

    std::optional<std::size_t> find(const Atom& atom) const;
    bool contains(const Atom& atom) const { return find(atom).has_value(); }
    bool is_primitive(std::size_t id) const { return birth[id] == 0; }
};

// Least fixpoint by semi-naive evaluation. Rule bodies may use variables
// (including inside compound terms); facts must be ground. Throws
// ProgramError for non-ground facts, unsafe rules or a blown round cap.
SaturationResult saturate(const LogicProgram& program, std::size_t max_rounds = 0);

enum class NodeKind { PrimitiveFact, Rule, Derivation };
std::string_view to_string(NodeKind kind);

struct GraphNode {
    std::size_t id = 0;
    NodeKind kind = NodeKind::PrimitiveFact;
    Atom atom;                          // fact and derivation nodes
    std::string label;                  // rule nodes
    bool is_goal = false;
    std::vector<std::size_t> parents;
    std::vector<std::size_t> children;
};

// Tripartite AND/OR graph: rule nodes are AND, derivation nodes are OR,
// primitive facts are leaves.
class AttackGraph {
public:
    std::size_t add_fact(Atom atom);
    std::size_t add_rule(std::string label);
    std::size_t add_derivation(Atom atom);
    void add_edge(std::size_t parent, std::size_t child);
    void mark_goal(std::size_t id);

    const std::vector<GraphNode>& nodes() const { return nodes_; }
    const GraphNode& node(std::size_t id) const { return nodes_.at(id); }
    std::size_t size() const { return nodes_.size(); }
    std::size_t edge_count() const { return edges_; }
    const std::vector<std::size_t>& goals() const { return goals_; }
    std::optional<std::size_t> find(const Atom& atom) const;

    // Throws MetricsError when a kind invariant is violated.
    void validate() const;

    std::vector<Atom> protected_goals;  // not derivable
    std::vector<Atom> trivial_goals;    // already true in the input facts

private:
    std::size_t add(GraphNode node);

    std::vector<GraphNode> nodes_;
    std::vector<std::size_t> goals_;
    std::size_t edges_ = 0;
};

// Backward slice of the firing log from the derivable goals. Firings with
// the same rule and body set are merged; node ids follow log order.
AttackGraph build_attack_graph(const SaturationResult& saturation, const LogicProgram& program,
                               const std::vector<Atom>& goals);

// box = fact, ellipse = rule, diamond = derivation
std::string to_dot(const AttackGraph& graph);
std::string to_json(const AttackGraph& graph);
AttackGraph graph_from_json(std::string_view document);

}  // namespace iota
