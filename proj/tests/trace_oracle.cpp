#include "trace_oracle.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace oracle {

using iota::AttackGraph;
using iota::GraphNode;
using iota::NodeKind;

namespace {

bool is_vuln_fact(const GraphNode& n) {
    return n.kind == NodeKind::PrimitiveFact && n.atom.predicate == "vulExists" && n.atom.args.size() == 2;
}

struct PartialTrace {
    std::set<std::size_t> included;
    std::map<std::size_t, std::size_t> choice;
    std::vector<std::size_t> pending;
};

// Longest path into each node of the chosen subgraph; false on a cycle.
bool trace_depth(const AttackGraph& g, const PartialTrace& t, std::size_t goal, std::size_t& depth) {
    std::map<std::size_t, int> colour;  // 1 = on stack, 2 = done
    std::map<std::size_t, std::size_t> memo;
    std::function<bool(std::size_t)> visit = [&](std::size_t v) {
        auto c = colour.find(v);
        if (c != colour.end()) return c->second == 2;
        colour[v] = 1;
        const GraphNode& n = g.node(v);
        std::size_t d = 0;
        if (n.kind == NodeKind::Rule) {
            for (std::size_t p : n.parents) {
                if (!visit(p)) return false;
                d = std::max(d, memo[p] + 1);
            }
        } else if (n.kind == NodeKind::Derivation) {
            const std::size_t p = t.choice.at(v);
            if (!visit(p)) return false;
            d = memo[p] + 1;
        }
        memo[v] = d;
        colour[v] = 2;
        return true;
    };
    if (!visit(goal)) return false;
    depth = memo[goal];
    return true;
}

void expand(const AttackGraph& g, std::size_t goal, PartialTrace t, std::vector<SubgraphTrace>& out,
            std::size_t limit) {
    while (!t.pending.empty()) {
        if (out.size() >= limit) return;
        const std::size_t v = t.pending.back();
        t.pending.pop_back();
        const GraphNode& n = g.node(v);
        if (n.kind == NodeKind::Rule) {
            for (std::size_t p : n.parents)
                if (t.included.insert(p).second) t.pending.push_back(p);
        } else if (n.kind == NodeKind::Derivation && !t.choice.count(v)) {
            for (std::size_t r : n.parents) {
                PartialTrace branch = t;
                branch.choice[v] = r;
                if (branch.included.insert(r).second) branch.pending.push_back(r);
                expand(g, goal, std::move(branch), out, limit);
            }
            return;
        }
    }
    std::size_t depth = 0;
    if (!trace_depth(g, t, goal, depth)) return;
    SubgraphTrace trace;
    trace.nodes = t.included;
    trace.choice = t.choice;
    trace.depth = depth;
    for (std::size_t v : t.included)
        if (is_vuln_fact(g.node(v))) trace.cves.insert(g.node(v).atom.args[1].name);
    out.push_back(std::move(trace));
}

}  // namespace

std::vector<SubgraphTrace> enumerate_traces(const AttackGraph& graph, std::size_t goal, std::size_t limit) {
    std::vector<SubgraphTrace> out;
    PartialTrace start;
    start.included.insert(goal);
    start.pending.push_back(goal);
    expand(graph, goal, std::move(start), out, limit);
    return out;
}

std::size_t min_trace_depth(const AttackGraph& graph, std::size_t goal) {
    std::size_t best = iota::kUnreachable;
    for (const auto& t : enumerate_traces(graph, goal)) best = std::min(best, t.depth);
    return best;
}

bool is_acyclic(const AttackGraph& graph) {
    std::vector<int> colour(graph.size(), 0);
    std::function<bool(std::size_t)> visit = [&](std::size_t v) {
        if (colour[v] == 1) return false;
        if (colour[v] == 2) return true;
        colour[v] = 1;
        for (std::size_t c : graph.node(v).children)
            if (!visit(c)) return false;
        colour[v] = 2;
        return true;
    };
    for (std::size_t v = 0; v < graph.size(); ++v)
        if (!visit(v)) return false;
    return true;
}

CatFamily derivation_tree_cats(const AttackGraph& graph, std::size_t node) {
    if (!is_acyclic(graph)) throw std::logic_error("derivation_tree_cats needs an acyclic graph");
    std::map<std::size_t, CatFamily> memo;
    std::function<const CatFamily&(std::size_t)> cats = [&](std::size_t v) -> const CatFamily& {
        auto it = memo.find(v);
        if (it != memo.end()) return it->second;
        const GraphNode& n = graph.node(v);
        CatFamily out;
        if (n.kind == NodeKind::PrimitiveFact) {
            out.insert(is_vuln_fact(n) ? CveSet{n.atom.args[1].name} : CveSet{});
        } else if (n.kind == NodeKind::Derivation) {
            for (std::size_t p : n.parents) {
                const CatFamily& sub = cats(p);
                out.insert(sub.begin(), sub.end());
            }
        } else {
            out.insert(CveSet{});
            for (std::size_t p : n.parents) {
                const CatFamily sub = cats(p);
                CatFamily next;
                for (const auto& a : out)
                    for (const auto& b : sub) {
                        CveSet u = a;
                        u.insert(b.begin(), b.end());
                        next.insert(std::move(u));
                    }
                out = std::move(next);
            }
        }
        return memo[v] = std::move(out);
    };
    return cats(node);
}

std::map<std::string, std::set<std::size_t>> blast_radius(const AttackGraph& graph) {
    std::map<std::string, std::set<std::size_t>> br;
    for (const auto& n : graph.nodes())
        if (is_vuln_fact(n)) br[n.atom.args[1].name];
    for (const auto& n : graph.nodes()) {
        if (n.kind != NodeKind::Derivation) continue;
        for (const auto& cat : derivation_tree_cats(graph, n.id))
            if (cat.size() == 1) br[*cat.begin()].insert(n.id);
    }
    return br;
}

CatFamily minimal(const CatFamily& family) {
    CatFamily out;
    for (const auto& a : family) {
        bool dominated = false;
        for (const auto& b : family)
            if (b != a && std::includes(a.begin(), a.end(), b.begin(), b.end())) {
                dominated = true;
                break;
            }
        if (!dominated) out.insert(a);
    }
    return out;
}

CatFamily to_family(const iota::AttackEvidence& evidence, const iota::VulnUniverse& universe) {
    CatFamily out;
    for (const auto& cat : evidence.cats()) {
        CveSet s;
        for (std::size_t b : cat.bits()) s.insert(universe.cves.at(b));
        out.insert(std::move(s));
    }
    return out;
}

std::string check_trace(const AttackGraph& graph, const iota::AttackTrace& trace) {
    if (trace.nodes.empty()) return "empty trace";
    if (trace.nodes.back().node != trace.goal) return "goal is not the last node";
    std::map<std::size_t, std::size_t> depth;
    std::set<std::size_t> used;
    for (const auto& tn : trace.nodes) {
        if (depth.count(tn.node)) return "node " + std::to_string(tn.node) + " listed twice";
        const GraphNode& n = graph.node(tn.node);
        std::size_t d = 0;
        for (std::size_t p : tn.preds) {
            auto it = depth.find(p);
            if (it == depth.end()) return "node " + std::to_string(tn.node) + " listed before its predecessor";
            if (std::find(n.parents.begin(), n.parents.end(), p) == n.parents.end())
                return "node " + std::to_string(tn.node) + " has a non-parent predecessor";
            d = std::max(d, it->second + 1);
            used.insert(p);
        }
        switch (n.kind) {
            case NodeKind::PrimitiveFact:
                if (!tn.preds.empty()) return "fact with predecessors";
                break;
            case NodeKind::Rule: {
                std::set<std::size_t> want(n.parents.begin(), n.parents.end());
                std::set<std::size_t> got(tn.preds.begin(), tn.preds.end());
                if (want != got) return "rule node " + std::to_string(tn.node) + " misses a parent";
                break;
            }
            case NodeKind::Derivation:
                if (tn.preds.size() != 1) return "derivation node " + std::to_string(tn.node) + " needs one predecessor";
                break;
        }
        depth[tn.node] = d;
    }
    for (const auto& tn : trace.nodes)
        if (tn.node != trace.goal && !used.count(tn.node)) return "node " + std::to_string(tn.node) + " is dangling";
    if (depth[trace.goal] != trace.depth) return "claimed depth differs from trace depth";
    return "";
}

iota::AttackGraph random_dag(std::mt19937_64& rng, const RandomGraphSpec& spec) {
    auto below = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
    AttackGraph g;
    const std::size_t vulns = 1 + below(spec.max_vulns);
    const std::size_t leaves = 2 + below(3);
    std::vector<std::size_t> available;
    for (std::size_t i = 0; i < leaves; ++i) {
        const std::string dev = "dev" + std::to_string(i);
        if (below(3) != 0) {
            const std::string cve = "CVE-2000-000" + std::to_string(1 + below(vulns));
            available.push_back(
                g.add_fact(iota::Atom{"vulExists", {iota::Term::constant(dev), iota::Term::constant(cve)}}));
        } else {
            available.push_back(g.add_fact(iota::Atom{"inNetwork", {iota::Term::constant(dev), iota::Term::constant("n")}}));
        }
    }
    std::size_t derived = 0;
    while (g.size() + 2 <= spec.max_nodes) {
        const std::size_t room = spec.max_nodes - g.size() - 1;
        const std::size_t rules = std::min<std::size_t>(1 + below(3), room);
        std::vector<std::size_t> rule_ids;
        for (std::size_t r = 0; r < rules; ++r) {
            const std::size_t id = g.add_rule("r" + std::to_string(g.size()));
            const std::size_t body = 1 + below(std::min<std::size_t>(3, available.size()));
            std::vector<std::size_t> pool = available;
            std::shuffle(pool.begin(), pool.end(), rng);
            for (std::size_t b = 0; b < body; ++b) g.add_edge(pool[b], id);
            rule_ids.push_back(id);
        }
        const std::size_t d =
            g.add_derivation(iota::Atom{"derived", {iota::Term::constant("d" + std::to_string(derived++))}});
        for (std::size_t r : rule_ids) g.add_edge(r, d);
        g.mark_goal(d);
        available.push_back(d);
    }
    return g;
}

}  // namespace oracle
