#include "iota/reasoner.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "iota/errors.hpp"

namespace iota {

namespace {

// Interned ground terms. Constants and compounds share one id space.
class TermTable {
public:
    int name_id(const std::string& name) {
        auto [it, inserted] = names_.emplace(name, static_cast<int>(name_of_.size()));
        if (inserted) name_of_.push_back(name);
        return it->second;
    }

    int make(int name, bool compound, std::vector<int> args) {
        Key key{name, compound, std::move(args)};
        auto it = index_.find(key);
        if (it != index_.end()) return it->second;
        const int id = static_cast<int>(nodes_.size());
        nodes_.push_back(key);
        index_.emplace(std::move(key), id);
        return id;
    }

    int intern(const Term& t) {
        if (t.kind == Term::Kind::Variable) throw ProgramError("unexpected variable " + t.name + " in a fact");
        std::vector<int> args;
        for (const auto& a : t.args) args.push_back(intern(a));
        return make(name_id(t.name), t.kind == Term::Kind::Compound, std::move(args));
    }

    Term rebuild(int id) const {
        const Key& k = nodes_[static_cast<std::size_t>(id)];
        if (!k.compound) return Term::constant(name_of_[static_cast<std::size_t>(k.name)]);
        std::vector<Term> args;
        for (int a : k.args) args.push_back(rebuild(a));
        return Term::compound(name_of_[static_cast<std::size_t>(k.name)], std::move(args));
    }

    bool is_compound(int id) const { return nodes_[static_cast<std::size_t>(id)].compound; }
    int name_of_term(int id) const { return nodes_[static_cast<std::size_t>(id)].name; }
    const std::vector<int>& args_of(int id) const { return nodes_[static_cast<std::size_t>(id)].args; }

private:
    struct Key {
        int name;
        bool compound;
        std::vector<int> args;
        bool operator<(const Key& o) const {
            return std::tie(name, compound, args) < std::tie(o.name, o.compound, o.args);
        }
    };
    std::map<std::string, int> names_;
    std::vector<std::string> name_of_;
    std::vector<Key> nodes_;
    std::map<Key, int> index_;
};

struct Pattern {
    enum class Kind { Const, Var, Compound } kind = Kind::Const;
    int id = 0;  // term id, variable slot, or functor name id
    std::vector<Pattern> args;
};

struct AtomPattern {
    int pred = 0;
    std::vector<Pattern> args;
};

struct CompiledRule {
    AtomPattern head;
    std::vector<AtomPattern> body;
    std::size_t vars = 0;
};

struct VecHash {
    std::size_t operator()(const std::vector<int>& v) const noexcept {
        std::size_t h = v.size();
        for (int x : v) h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return h;
    }
};

class Engine {
public:
    explicit Engine(const LogicProgram& program) : program_(program) {}

    SaturationResult run(std::size_t max_rounds) {
        for (const auto& f : program_.facts) {
            if (!f.is_ground()) throw ProgramError("fact is not ground: " + to_string(f));
            add_fact(pred_id(f.predicate, f.args.size()), ground_args(f), 0);
        }
        for (const auto& r : program_.rules) rules_.push_back(compile(r));
        by_pred_.resize(pred_names_.size());
        // input facts were added before every predicate was known
        for (std::size_t id = 0; id < fact_pred_.size(); ++id) by_pred_[static_cast<std::size_t>(fact_pred_[id])].push_back(id);

        for (std::size_t ri = 0; ri < rules_.size(); ++ri)
            if (rules_[ri].body.empty()) fire(ri, 0);

        std::size_t round = 0;
        for (;; ++round) {
            const std::size_t cap = max_rounds ? max_rounds : fact_pred_.size() + 2;
            if (round > cap) throw ProgramError("saturation exceeded " + std::to_string(cap) + " rounds");
            for (std::size_t ri = 0; ri < rules_.size(); ++ri)
                for (std::size_t d = 0; d < rules_[ri].body.size(); ++d) {
                    const auto& list = by_pred_[static_cast<std::size_t>(rules_[ri].body[d].pred)];
                    auto [lo, hi] = birth_range(list, round, round);
                    if (lo == hi) continue;
                    std::vector<int> binding(rules_[ri].vars, -1);
                    std::vector<std::size_t> chosen(rules_[ri].body.size());
                    join(ri, d, round, 0, binding, chosen);
                }
            if (!any_birth(round + 1)) break;
        }

        SaturationResult out;
        out.rounds = round + 1;
        out.birth = fact_birth_;
        out.firings = std::move(firings_);
        out.facts.reserve(fact_pred_.size());
        for (std::size_t id = 0; id < fact_pred_.size(); ++id) {
            Atom a{pred_names_[static_cast<std::size_t>(fact_pred_[id])], {}};
            for (int t : fact_args_[id]) a.args.push_back(terms_.rebuild(t));
            out.index.emplace(a, id);
            out.facts.push_back(std::move(a));
        }
        return out;
    }

private:
    int pred_id(const std::string& name, std::size_t arity) {
        auto [it, inserted] = preds_.emplace(std::make_pair(name, arity), static_cast<int>(pred_names_.size()));
        if (inserted) pred_names_.push_back(name);
        return it->second;
    }

    std::vector<int> ground_args(const Atom& a) {
        std::vector<int> out;
        for (const auto& t : a.args) out.push_back(terms_.intern(t));
        return out;
    }

    Pattern compile_term(const Term& t, std::map<std::string, std::size_t>& vars) {
        Pattern p;
        switch (t.kind) {
            case Term::Kind::Variable: {
                auto [it, _] = vars.emplace(t.name, vars.size());
                p.kind = Pattern::Kind::Var;
                p.id = static_cast<int>(it->second);
                break;
            }
            case Term::Kind::Constant:
                p.kind = Pattern::Kind::Const;
                p.id = terms_.intern(t);
                break;
            case Term::Kind::Compound:
                if (t.is_ground()) {
                    p.kind = Pattern::Kind::Const;
                    p.id = terms_.intern(t);
                } else {
                    p.kind = Pattern::Kind::Compound;
                    p.id = terms_.name_id(t.name);
                    for (const auto& a : t.args) p.args.push_back(compile_term(a, vars));
                }
                break;
        }
        return p;
    }

    CompiledRule compile(const HornRule& r) {
        if (!is_range_restricted(r)) throw ProgramError("rule is not range-restricted: " + to_string(r));
        std::map<std::string, std::size_t> vars;
        CompiledRule c;
        for (const auto& b : r.body) {
            AtomPattern ap{pred_id(b.predicate, b.args.size()), {}};
            for (const auto& t : b.args) ap.args.push_back(compile_term(t, vars));
            c.body.push_back(std::move(ap));
        }
        c.head.pred = pred_id(r.head.predicate, r.head.args.size());
        for (const auto& t : r.head.args) c.head.args.push_back(compile_term(t, vars));
        c.vars = vars.size();
        return c;
    }

    std::size_t add_fact(int pred, std::vector<int> args, std::size_t birth, bool* created = nullptr) {
        std::vector<int> key;
        key.reserve(args.size() + 1);
        key.push_back(pred);
        key.insert(key.end(), args.begin(), args.end());
        auto it = fact_index_.find(key);
        if (created) *created = it == fact_index_.end();
        if (it != fact_index_.end()) return it->second;
        const std::size_t id = fact_pred_.size();
        fact_index_.emplace(std::move(key), id);
        if (!args.empty()) by_arg0_[arg0_key(pred, args[0])].push_back(id);
        if (static_cast<std::size_t>(pred) < by_pred_.size()) by_pred_[static_cast<std::size_t>(pred)].push_back(id);
        fact_pred_.push_back(pred);
        fact_args_.push_back(std::move(args));
        fact_birth_.push_back(birth);
        if (birth > max_birth_) max_birth_ = birth;
        return id;
    }

    static std::uint64_t arg0_key(int pred, int arg) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(pred)) << 32) | static_cast<std::uint32_t>(arg);
    }

    bool any_birth(std::size_t b) const { return max_birth_ >= b; }

    // Index range of facts in `list` whose birth lies in [lo, hi].
    std::pair<std::size_t, std::size_t> birth_range(const std::vector<std::size_t>& list, std::size_t lo,
                                                    std::size_t hi) const {
        auto first = std::partition_point(list.begin(), list.end(), [&](std::size_t id) { return fact_birth_[id] < lo; });
        auto last = std::partition_point(first, list.end(), [&](std::size_t id) { return fact_birth_[id] <= hi; });
        return {static_cast<std::size_t>(first - list.begin()), static_cast<std::size_t>(last - list.begin())};
    }

    bool match(const Pattern& p, int term, std::vector<int>& binding, std::vector<std::size_t>& trail) const {
        switch (p.kind) {
            case Pattern::Kind::Const:
                return p.id == term;
            case Pattern::Kind::Var: {
                int& slot = binding[static_cast<std::size_t>(p.id)];
                if (slot >= 0) return slot == term;
                slot = term;
                trail.push_back(static_cast<std::size_t>(p.id));
                return true;
            }
            case Pattern::Kind::Compound: {
                if (!terms_.is_compound(term) || terms_.name_of_term(term) != p.id) return false;
                const auto& args = terms_.args_of(term);
                if (args.size() != p.args.size()) return false;
                for (std::size_t i = 0; i < args.size(); ++i)
                    if (!match(p.args[i], args[i], binding, trail)) return false;
                return true;
            }
        }
        return false;
    }

    // Ground id of a pattern under the binding, or -1 when unbound/unknown.
    int resolve(const Pattern& p, const std::vector<int>& binding, bool create) {
        switch (p.kind) {
            case Pattern::Kind::Const: return p.id;
            case Pattern::Kind::Var: return binding[static_cast<std::size_t>(p.id)];
            case Pattern::Kind::Compound: {
                std::vector<int> args;
                for (const auto& a : p.args) {
                    const int id = resolve(a, binding, create);
                    if (id < 0) return -1;
                    args.push_back(id);
                }
                if (create) return terms_.make(p.id, true, std::move(args));
                return -2;  // ground but possibly not interned; fall back to a scan
            }
        }
        return -1;
    }

    void join(std::size_t ri, std::size_t d, std::size_t round, std::size_t step, std::vector<int>& binding,
              std::vector<std::size_t>& chosen) {
        const CompiledRule& rule = rules_[ri];
        const std::size_t n = rule.body.size();
        if (step == n) {
            fire_with(ri, binding, chosen, round);
            return;
        }
        // d first, then the remaining positions left to right
        const std::size_t pos = step == 0 ? d : (step <= d ? step - 1 : step);
        const AtomPattern& pat = rule.body[pos];
        const std::size_t lo = pos == d ? round : 0;
        const std::size_t hi = pos < d ? (round == 0 ? 0 : round - 1) : round;
        if (pos < d && round == 0) return;  // no facts born before round 0

        const std::vector<std::size_t>* list = &by_pred_[static_cast<std::size_t>(pat.pred)];
        if (!pat.args.empty()) {
            const int a0 = resolve(pat.args[0], binding, false);
            if (a0 >= 0) {
                auto it = by_arg0_.find(arg0_key(pat.pred, a0));
                if (it == by_arg0_.end()) return;
                list = &it->second;
            }
        }
        auto [begin, end] = birth_range(*list, lo, hi);
        std::vector<std::size_t> trail;
        for (std::size_t i = begin; i < end; ++i) {
            const std::size_t fact = (*list)[i];
            const auto& args = fact_args_[fact];
            trail.clear();
            bool ok = true;
            for (std::size_t k = 0; k < args.size() && ok; ++k) ok = match(pat.args[k], args[k], binding, trail);
            if (ok) {
                chosen[pos] = fact;
                join(ri, d, round, step + 1, binding, chosen);
            }
            for (std::size_t v : trail) binding[v] = -1;
        }
    }

    void fire_with(std::size_t ri, const std::vector<int>& binding, const std::vector<std::size_t>& chosen,
                   std::size_t round) {
        const CompiledRule& rule = rules_[ri];
        std::vector<int> args;
        std::vector<int> mutable_binding = binding;
        for (const auto& p : rule.head.args) args.push_back(resolve(p, mutable_binding, true));
        const std::size_t head = add_fact(rule.head.pred, std::move(args), round + 1);
        firings_.push_back({ri, chosen, head});
    }

    void fire(std::size_t ri, std::size_t round) {
        std::vector<int> binding(rules_[ri].vars, -1);
        fire_with(ri, binding, {}, round);
    }

    const LogicProgram& program_;
    TermTable terms_;
    std::map<std::pair<std::string, std::size_t>, int> preds_;
    std::vector<std::string> pred_names_;
    std::vector<CompiledRule> rules_;

    std::vector<int> fact_pred_;
    std::vector<std::vector<int>> fact_args_;
    std::vector<std::size_t> fact_birth_;
    std::size_t max_birth_ = 0;
    std::unordered_map<std::vector<int>, std::size_t, VecHash> fact_index_;
    std::vector<std::vector<std::size_t>> by_pred_;
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> by_arg0_;
    std::vector<Firing> firings_;
};

}  // namespace

std::optional<std::size_t> SaturationResult::find(const Atom& atom) const {
    auto it = index.find(atom);
    if (it == index.end()) return std::nullopt;
    return it->second;
}

SaturationResult saturate(const LogicProgram& program, std::size_t max_rounds) {
    return Engine(program).run(max_rounds);
}

// ---- attack graph ----------------------------------------------------------

std::string_view to_string(NodeKind kind) {
    switch (kind) {
        case NodeKind::PrimitiveFact: return "fact";
        case NodeKind::Rule: return "rule";
        case NodeKind::Derivation: return "derivation";
    }
    return "fact";
}

std::size_t AttackGraph::add(GraphNode node) {
    node.id = nodes_.size();
    nodes_.push_back(std::move(node));
    return nodes_.back().id;
}

std::size_t AttackGraph::add_fact(Atom atom) {
    GraphNode n;
    n.kind = NodeKind::PrimitiveFact;
    n.atom = std::move(atom);
    return add(std::move(n));
}

std::size_t AttackGraph::add_rule(std::string label) {
    GraphNode n;
    n.kind = NodeKind::Rule;
    n.label = std::move(label);
    return add(std::move(n));
}

std::size_t AttackGraph::add_derivation(Atom atom) {
    GraphNode n;
    n.kind = NodeKind::Derivation;
    n.atom = std::move(atom);
    return add(std::move(n));
}

void AttackGraph::add_edge(std::size_t parent, std::size_t child) {
    auto& p = nodes_.at(parent);
    auto& c = nodes_.at(child);
    if (std::find(c.parents.begin(), c.parents.end(), parent) != c.parents.end()) return;
    c.parents.push_back(parent);
    p.children.push_back(child);
    ++edges_;
}

void AttackGraph::mark_goal(std::size_t id) {
    auto& n = nodes_.at(id);
    if (n.is_goal) return;
    n.is_goal = true;
    goals_.push_back(id);
}

std::optional<std::size_t> AttackGraph::find(const Atom& atom) const {
    for (const auto& n : nodes_)
        if (n.kind != NodeKind::Rule && n.atom == atom) return n.id;
    return std::nullopt;
}

void AttackGraph::validate() const {
    for (const auto& n : nodes_) {
        const std::string where = "node " + std::to_string(n.id);
        switch (n.kind) {
            case NodeKind::PrimitiveFact:
                if (!n.parents.empty()) throw MetricsError(where + ": primitive fact with parents");
                break;
            case NodeKind::Rule:
                if (n.parents.empty()) throw MetricsError(where + ": rule without body");
                if (n.children.size() != 1) throw MetricsError(where + ": rule must have exactly one child");
                if (nodes_[n.children[0]].kind != NodeKind::Derivation)
                    throw MetricsError(where + ": rule child is not a derivation");
                for (std::size_t p : n.parents)
                    if (nodes_[p].kind == NodeKind::Rule) throw MetricsError(where + ": rule feeds a rule");
                break;
            case NodeKind::Derivation:
                if (n.parents.empty()) throw MetricsError(where + ": derivation without rule");
                for (std::size_t p : n.parents)
                    if (nodes_[p].kind != NodeKind::Rule) throw MetricsError(where + ": derivation parent is not a rule");
                break;
        }
    }
}

AttackGraph build_attack_graph(const SaturationResult& sat, const LogicProgram& program, const std::vector<Atom>& goals) {
    AttackGraph g;

    // merge firings with the same rule and body set
    struct Merged {
        std::size_t rule;
        std::vector<std::size_t> body;  // first-appearance order, unique
        std::size_t head;
    };
    std::vector<Merged> merged;
    std::map<std::pair<std::size_t, std::vector<std::size_t>>, std::size_t> seen;
    std::vector<std::vector<std::size_t>> producers(sat.facts.size());
    for (const auto& f : sat.firings) {
        std::vector<std::size_t> key = f.body;
        std::sort(key.begin(), key.end());
        key.erase(std::unique(key.begin(), key.end()), key.end());
        if (!seen.emplace(std::make_pair(f.rule, key), merged.size()).second) continue;
        std::vector<std::size_t> body;
        for (std::size_t b : f.body)
            if (std::find(body.begin(), body.end(), b) == body.end()) body.push_back(b);
        producers[f.head].push_back(merged.size());
        merged.push_back({f.rule, std::move(body), f.head});
    }

    std::vector<std::size_t> goal_facts;
    for (const auto& goal : goals) {
        auto id = sat.find(goal);
        if (!id) g.protected_goals.push_back(goal);
        else if (sat.is_primitive(*id)) g.trivial_goals.push_back(goal);
        else goal_facts.push_back(*id);
    }

    // backward slice
    std::vector<bool> fact_in(sat.facts.size(), false);
    std::vector<bool> firing_in(merged.size(), false);
    std::vector<std::size_t> stack = goal_facts;
    for (std::size_t f : stack) fact_in[f] = true;
    while (!stack.empty()) {
        const std::size_t f = stack.back();
        stack.pop_back();
        for (std::size_t m : producers[f]) {
            if (firing_in[m]) continue;
            firing_in[m] = true;
            for (std::size_t b : merged[m].body)
                if (!fact_in[b]) {
                    fact_in[b] = true;
                    stack.push_back(b);
                }
        }
    }

    std::vector<std::optional<std::size_t>> node_of(sat.facts.size());
    auto fact_node = [&](std::size_t f) {
        if (!node_of[f])
            node_of[f] = sat.is_primitive(f) ? g.add_fact(sat.facts[f]) : g.add_derivation(sat.facts[f]);
        return *node_of[f];
    };
    for (std::size_t m = 0; m < merged.size(); ++m) {
        if (!firing_in[m]) continue;
        std::vector<std::size_t> parents;
        for (std::size_t b : merged[m].body) parents.push_back(fact_node(b));
        const auto& r = program.rules.at(merged[m].rule);
        const std::size_t rn = g.add_rule(r.label.empty() ? to_string(r.head) : r.label);
        for (std::size_t p : parents) g.add_edge(p, rn);
        g.add_edge(rn, fact_node(merged[m].head));
    }
    for (std::size_t f : goal_facts) g.mark_goal(fact_node(f));
    return g;
}

// ---- export ----------------------------------------------------------------

namespace {

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

}  // namespace

std::string to_dot(const AttackGraph& graph) {
    std::ostringstream out;
    out << "digraph attack_graph {\n";
    for (const auto& n : graph.nodes()) {
        const char* shape = n.kind == NodeKind::PrimitiveFact ? "box" : n.kind == NodeKind::Rule ? "ellipse" : "diamond";
        const std::string text = n.kind == NodeKind::Rule ? n.label : to_string(n.atom);
        out << "  n" << n.id << " [shape=" << shape << ", label=\"" << n.id << ": " << dot_escape(text) << '"';
        if (n.is_goal) out << ", penwidth=2";
        out << "];\n";
    }
    for (const auto& n : graph.nodes())
        for (std::size_t c : n.children) out << "  n" << n.id << " -> n" << c << ";\n";
    out << "}\n";
    return out.str();
}

std::string to_json(const AttackGraph& graph) {
    using nlohmann::json;
    json nodes = json::array();
    json edges = json::array();
    for (const auto& n : graph.nodes()) {
        json j{{"id", n.id}, {"kind", std::string(to_string(n.kind))}, {"goal", n.is_goal}};
        if (n.kind == NodeKind::Rule) j["label"] = n.label;
        else j["atom"] = to_string(n.atom);
        nodes.push_back(std::move(j));
        // grouped by child in parent order, so rule bodies reload in body order
        for (std::size_t p : n.parents) edges.push_back({p, n.id});
    }
    json out{{"nodes", nodes}, {"edges", edges}, {"goals", graph.goals()}};
    json prot = json::array(), triv = json::array();
    for (const auto& a : graph.protected_goals) prot.push_back(to_string(a));
    for (const auto& a : graph.trivial_goals) triv.push_back(to_string(a));
    out["protected"] = prot;
    out["trivial"] = triv;
    return out.dump(2);
}

AttackGraph graph_from_json(std::string_view document) {
    using nlohmann::json;
    AttackGraph g;
    try {
        const json j = json::parse(document);
        for (const auto& n : j.at("nodes")) {
            const std::string kind = n.at("kind").get<std::string>();
            const std::size_t expected = g.size();
            if (n.at("id").get<std::size_t>() != expected) throw MetricsError("graph node ids must be dense and ordered");
            if (kind == "rule") g.add_rule(n.at("label").get<std::string>());
            else if (kind == "fact") g.add_fact(parse_atom(n.at("atom").get<std::string>()));
            else if (kind == "derivation") g.add_derivation(parse_atom(n.at("atom").get<std::string>()));
            else throw MetricsError("unknown node kind '" + kind + "'");
        }
        for (const auto& e : j.at("edges")) g.add_edge(e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>());
        for (const auto& id : j.at("goals")) g.mark_goal(id.get<std::size_t>());
        if (j.contains("protected"))
            for (const auto& a : j.at("protected")) g.protected_goals.push_back(parse_atom(a.get<std::string>()));
        if (j.contains("trivial"))
            for (const auto& a : j.at("trivial")) g.trivial_goals.push_back(parse_atom(a.get<std::string>()));
    } catch (const json::exception& e) {
        throw MetricsError(std::string("graph dump: ") + e.what());
    } catch (const std::out_of_range& e) {
        throw MetricsError(std::string("graph dump: ") + e.what());
    }
    g.validate();
    return g;
}

}  // namespace iota
