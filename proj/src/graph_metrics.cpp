#include "iota/graph_metrics.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <exception>
#include <queue>
#include <sstream>

#include <json.hpp>
#include <omp.h>

#include "iota/errors.hpp"

namespace iota {

// ---- CAT -------------------------------------------------------------------

Cat::Cat(std::size_t universe) : universe_(universe) {
    if (word_count() > kInlineWords) heap_.assign(word_count(), 0);
}

Cat Cat::single(std::size_t universe, std::size_t bit) {
    Cat c(universe);
    c.set(bit);
    return c;
}

bool Cat::test(std::size_t bit) const { return bit < universe_ && (words()[bit / 64] >> (bit % 64)) & 1U; }

void Cat::set(std::size_t bit) {
    if (bit >= universe_) throw MetricsError("CAT bit " + std::to_string(bit) + " outside universe");
    words()[bit / 64] |= std::uint64_t{1} << (bit % 64);
}

std::size_t Cat::count() const {
    std::size_t n = 0;
    const std::uint64_t* w = words();
    for (std::size_t i = 0; i < word_count(); ++i) n += static_cast<std::size_t>(std::popcount(w[i]));
    return n;
}

std::vector<std::size_t> Cat::bits() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < universe_; ++i)
        if (test(i)) out.push_back(i);
    return out;
}

bool Cat::subset_of(const Cat& other) const {
    if (universe_ != other.universe_) return false;
    const std::uint64_t *a = words(), *b = other.words();
    for (std::size_t i = 0; i < word_count(); ++i)
        if (a[i] & ~b[i]) return false;
    return true;
}

Cat Cat::operator|(const Cat& other) const {
    if (universe_ != other.universe_) throw MetricsError("CAT universe mismatch");
    Cat out(universe_);
    const std::uint64_t *a = words(), *b = other.words();
    std::uint64_t* o = out.words();
    for (std::size_t i = 0; i < word_count(); ++i) o[i] = a[i] | b[i];
    return out;
}

std::strong_ordering Cat::operator<=>(const Cat& other) const {
    if (auto c = universe_ <=> other.universe_; c != 0) return c;
    const std::uint64_t *a = words(), *b = other.words();
    for (std::size_t i = 0; i < word_count(); ++i)
        if (auto c = a[i] <=> b[i]; c != 0) return c;
    return std::strong_ordering::equal;
}

std::string Cat::to_string() const {
    std::string out = "[";
    for (std::size_t i = 0; i < universe_; ++i) out += test(i) ? '1' : '0';
    return out + "]";
}

// ---- evidence --------------------------------------------------------------

AttackEvidence::AttackEvidence(std::vector<Cat> cats) : cats_(std::move(cats)) {
    std::sort(cats_.begin(), cats_.end());
    cats_.erase(std::unique(cats_.begin(), cats_.end()), cats_.end());
    for (const auto& c : cats_)
        if (c.universe() != cats_.front().universe()) throw MetricsError("attack evidence mixes CAT universes");
}

bool AttackEvidence::contains(const Cat& cat) const { return std::binary_search(cats_.begin(), cats_.end(), cat); }

namespace {

void check_universe(const AttackEvidence& a, const AttackEvidence& b) {
    if (!a.empty() && !b.empty() && a.cats().front().universe() != b.cats().front().universe())
        throw MetricsError("attack evidence universe mismatch");
}

}  // namespace

AttackEvidence merge_ae_or(const AttackEvidence& a, const AttackEvidence& b) {
    check_universe(a, b);
    std::vector<Cat> out;
    out.reserve(a.size() + b.size());
    std::set_union(a.cats().begin(), a.cats().end(), b.cats().begin(), b.cats().end(), std::back_inserter(out));
    return AttackEvidence(std::move(out));
}

AttackEvidence merge_ae_and(const AttackEvidence& a, const AttackEvidence& b, std::size_t cap) {
    check_universe(a, b);
    auto only_zero = [](const AttackEvidence& e) { return e.size() == 1 && e.cats().front().is_zero(); };
    if (only_zero(a) || only_zero(b)) {
        const AttackEvidence& other = only_zero(a) ? b : a;
        if (other.size() > cap)
            throw MetricsError("attack evidence exceeds " + std::to_string(cap) + " CATs");
        return other;
    }
    std::vector<Cat> out;
    out.reserve(a.size() * b.size());
    for (const auto& x : a.cats())
        for (const auto& y : b.cats()) out.push_back(x | y);
    AttackEvidence merged(std::move(out));
    if (merged.size() > cap)
        throw MetricsError("attack evidence exceeds " + std::to_string(cap) + " CATs");
    return merged;
}

VulnUniverse vulnerability_universe(const AttackGraph& graph) {
    VulnUniverse u;
    for (const auto& n : graph.nodes()) {
        if (n.kind != NodeKind::PrimitiveFact || n.atom.predicate != "vulExists" || n.atom.args.size() != 2) continue;
        const std::string& cve = n.atom.args[1].name;
        if (u.bit.emplace(cve, u.cves.size()).second) u.cves.push_back(cve);
    }
    return u;
}

namespace {

// Strongly connected components over parent -> child edges, sources first.
std::vector<std::vector<std::size_t>> components_in_order(const AttackGraph& graph) {
    const std::size_t n = graph.size();
    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> index(n, kNone), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::vector<std::vector<std::size_t>> out;
    std::size_t next = 0;
    // Iterative Tarjan: frames hold (node, next child position).
    std::vector<std::pair<std::size_t, std::size_t>> frames;
    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != kNone) continue;
        frames.push_back({root, 0});
        index[root] = low[root] = next++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!frames.empty()) {
            auto& [v, pos] = frames.back();
            const auto& children = graph.node(v).children;
            if (pos < children.size()) {
                const std::size_t w = children[pos++];
                if (index[w] == kNone) {
                    index[w] = low[w] = next++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            const std::size_t done = v;
            frames.pop_back();
            if (!frames.empty()) low[frames.back().first] = std::min(low[frames.back().first], low[done]);
            if (low[done] == index[done]) {
                std::vector<std::size_t> comp;
                std::size_t w = kNone;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp.push_back(w);
                } while (w != done);
                std::sort(comp.begin(), comp.end());
                out.push_back(std::move(comp));
            }
        }
    }
    std::reverse(out.begin(), out.end());
    return out;
}

}  // namespace

EvidenceResult attack_evidence(const AttackGraph& graph, std::size_t cap) {
    EvidenceResult r;
    r.universe = vulnerability_universe(graph);
    const std::size_t width = r.universe.cves.size();
    r.evidence.resize(graph.size());

    for (const auto& n : graph.nodes()) {
        if (n.kind != NodeKind::PrimitiveFact) continue;
        if (n.atom.predicate == "vulExists" && n.atom.args.size() == 2)
            r.evidence[n.id] = AttackEvidence({Cat::single(width, r.universe.bit.at(n.atom.args[1].name))});
        else
            r.evidence[n.id] = AttackEvidence({Cat(width)});
    }

    auto evaluate = [&](const GraphNode& n) {
        AttackEvidence next;
        try {
            if (n.kind == NodeKind::Rule) {
                bool ready = !n.parents.empty();
                for (std::size_t p : n.parents) ready = ready && !r.evidence[p].empty();
                if (ready) {
                    next = r.evidence[n.parents.front()];
                    for (std::size_t i = 1; i < n.parents.size(); ++i)
                        next = merge_ae_and(next, r.evidence[n.parents[i]], cap);
                }
            } else {
                for (std::size_t p : n.parents) next = merge_ae_or(next, r.evidence[p]);
                if (next.size() > cap)
                    throw MetricsError("attack evidence exceeds " + std::to_string(cap) + " CATs");
            }
        } catch (const MetricsError& e) {
            throw MetricsError(std::string(e.what()) + " at node " + std::to_string(n.id));
        }
        return next;
    };

    // Components come parents first, so a node's outside parents are final
    // when its component is solved. Cycles iterate to their least fixpoint.
    std::vector<std::size_t> component(graph.size(), 0);
    const auto comps = components_in_order(graph);
    for (std::size_t c = 0; c < comps.size(); ++c)
        for (std::size_t id : comps[c]) component[id] = c;
    std::vector<bool> queued(graph.size(), false);
    std::deque<std::size_t> work;
    for (std::size_t c = 0; c < comps.size(); ++c) {
        for (std::size_t id : comps[c])
            if (graph.node(id).kind != NodeKind::PrimitiveFact) {
                work.push_back(id);
                queued[id] = true;
            }
        while (!work.empty()) {
            const std::size_t id = work.front();
            work.pop_front();
            queued[id] = false;
            const GraphNode& n = graph.node(id);
            AttackEvidence next = evaluate(n);
            if (next == r.evidence[id]) continue;
            r.evidence[id] = std::move(next);
            ++r.updates;
            for (std::size_t child : n.children)
                if (component[child] == c && !queued[child]) {
                    queued[child] = true;
                    work.push_back(child);
                }
        }
    }
    return r;
}

BlastRadius blast_radius(const AttackGraph& graph, const EvidenceResult& ev) {
    BlastRadius br;
    for (const auto& cve : ev.universe.cves) br[cve];
    for (const auto& n : graph.nodes()) {
        if (n.kind != NodeKind::Derivation) continue;
        for (const auto& cat : ev.evidence[n.id].cats())
            if (cat.count() == 1) {
                auto& nodes = br[ev.universe.cves[cat.bits().front()]];
                if (nodes.empty() || nodes.back() != n.id) nodes.push_back(n.id);
            }
    }
    return br;
}

bool br_dominates(const BlastRadius& br, const std::string& a, const std::string& b) {
    const auto ia = br.find(a), ib = br.find(b);
    if (ia == br.end() || ib == br.end()) throw MetricsError("unknown vulnerability in blast radius comparison");
    return std::includes(ia->second.begin(), ia->second.end(), ib->second.begin(), ib->second.end());
}

// ---- depth -----------------------------------------------------------------

std::vector<std::size_t> compute_depths(const AttackGraph& graph) {
    // Knuth's generalization of Dijkstra to AND/OR graphs: nodes are
    // finalized in nondecreasing depth order.
    const std::size_t n = graph.size();
    std::vector<std::size_t> depth(n, kUnreachable);
    std::vector<std::size_t> waiting(n, 0);
    std::vector<bool> done(n, false);
    using Item = std::pair<std::size_t, std::size_t>;  // depth, node
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;

    for (const auto& node : graph.nodes()) {
        waiting[node.id] = node.parents.size();
        if (node.kind == NodeKind::PrimitiveFact) {
            depth[node.id] = 0;
            queue.emplace(0, node.id);
        }
    }
    while (!queue.empty()) {
        const auto [d, id] = queue.top();
        queue.pop();
        if (done[id]) continue;
        done[id] = true;
        for (std::size_t c : graph.node(id).children) {
            if (done[c]) continue;
            if (graph.node(c).kind == NodeKind::Rule) {
                // the last parent to finish carries the maximum
                if (--waiting[c] == 0) {
                    depth[c] = d + 1;
                    queue.emplace(d + 1, c);
                }
            } else if (d + 1 < depth[c]) {
                depth[c] = d + 1;
                queue.emplace(d + 1, c);
            }
        }
    }
    return depth;
}

AttackTrace shortest_trace(const AttackGraph& graph, std::size_t goal, const std::vector<std::size_t>& depths) {
    if (goal >= graph.size()) throw MetricsError("goal node " + std::to_string(goal) + " is not in the graph");
    if (graph.node(goal).kind != NodeKind::Derivation)
        throw MetricsError("goal node " + std::to_string(goal) + " is not a derivation node");
    if (depths[goal] == kUnreachable) throw MetricsError("goal node " + std::to_string(goal) + " is unreachable");

    AttackTrace trace;
    trace.goal = goal;
    trace.depth = depths[goal];
    std::vector<bool> seen(graph.size(), false);

    auto chosen_parents = [&](std::size_t id) {
        const GraphNode& n = graph.node(id);
        if (n.kind == NodeKind::Rule) return n.parents;
        for (std::size_t p : n.parents)
            if (depths[p] != kUnreachable && depths[p] + 1 == depths[id]) return std::vector<std::size_t>{p};
        return std::vector<std::size_t>{};
    };

    // iterative post-order
    std::vector<std::pair<std::size_t, bool>> stack{{goal, false}};
    while (!stack.empty()) {
        auto [id, expanded] = stack.back();
        stack.pop_back();
        if (expanded) {
            trace.nodes.push_back({id, chosen_parents(id)});
            continue;
        }
        if (seen[id]) continue;
        seen[id] = true;
        stack.emplace_back(id, true);
        const auto preds = chosen_parents(id);
        for (auto it = preds.rbegin(); it != preds.rend(); ++it)
            if (!seen[*it]) stack.emplace_back(*it, false);
    }
    return trace;
}

AttackTrace shortest_trace(const AttackGraph& graph, std::size_t goal) {
    return shortest_trace(graph, goal, compute_depths(graph));
}

// ---- patching --------------------------------------------------------------

PatchSet minimal_patch_set(const AttackEvidence& goal_evidence, const VulnUniverse& universe) {
    PatchSet out;
    if (goal_evidence.empty()) throw MetricsError("goal has no attack evidence");
    for (const auto& cat : goal_evidence.cats())
        if (cat.is_zero()) {
            out.patchable = false;
            return out;
        }
    std::vector<bool> hit(goal_evidence.size(), false);
    std::size_t remaining = goal_evidence.size();
    while (remaining > 0) {
        std::size_t best = kUnreachable, best_count = 0;
        for (std::size_t v = 0; v < universe.cves.size(); ++v) {
            std::size_t count = 0;
            for (std::size_t i = 0; i < hit.size(); ++i)
                if (!hit[i] && goal_evidence.cats()[i].test(v)) ++count;
            if (count == 0) continue;
            if (count > best_count || (count == best_count && universe.cves[v] < universe.cves[best])) {
                best = v;
                best_count = count;
            }
        }
        out.cves.push_back(universe.cves[best]);
        for (std::size_t i = 0; i < hit.size(); ++i)
            if (!hit[i] && goal_evidence.cats()[i].test(best)) {
                hit[i] = true;
                --remaining;
            }
    }
    return out;
}

// ---- per-goal analysis -----------------------------------------------------

bool GoalReport::operator==(const GoalReport& o) const {
    auto same_trace = [](const AttackTrace& a, const AttackTrace& b) {
        if (a.goal != b.goal || a.depth != b.depth || a.nodes.size() != b.nodes.size()) return false;
        for (std::size_t i = 0; i < a.nodes.size(); ++i)
            if (a.nodes[i].node != b.nodes[i].node || a.nodes[i].preds != b.nodes[i].preds) return false;
        return true;
    };
    return node == o.node && goal == o.goal && depth == o.depth && same_trace(trace, o.trace) &&
           patch.patchable == o.patch.patchable && patch.cves == o.patch.cves && steps.size() == o.steps.size();
}

std::vector<TraceStep> trace_steps(const AttackGraph& graph, const AttackTrace& trace) {
    std::vector<TraceStep> out;
    for (const auto& tn : trace.nodes) {
        const GraphNode& n = graph.node(tn.node);
        if (n.kind != NodeKind::Rule) continue;
        out.push_back({n.id, n.label, graph.node(n.children.front()).atom});
    }
    return out;
}

namespace {

GoalReport analyze_goal(const AttackGraph& graph, const EvidenceResult& ev, const std::vector<std::size_t>& depths,
                        std::size_t goal) {
    GoalReport r;
    r.node = goal;
    r.goal = graph.node(goal).atom;
    r.trace = shortest_trace(graph, goal, depths);
    r.depth = r.trace.depth;
    r.steps = trace_steps(graph, r.trace);
    r.patch = minimal_patch_set(ev.evidence[goal], ev.universe);
    return r;
}

}  // namespace

std::vector<GoalReport> analyze_goals_serial(const AttackGraph& graph, const EvidenceResult& ev,
                                             const std::vector<std::size_t>& depths) {
    std::vector<GoalReport> out;
    for (std::size_t g : graph.goals()) out.push_back(analyze_goal(graph, ev, depths, g));
    return out;
}

std::vector<GoalReport> analyze_goals(const AttackGraph& graph, const EvidenceResult& ev,
                                      const std::vector<std::size_t>& depths, int jobs) {
    const auto& goals = graph.goals();
    std::vector<GoalReport> out(goals.size());
    std::exception_ptr error;
    const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(goals.size()); ++i) {
        try {
            out[static_cast<std::size_t>(i)] = analyze_goal(graph, ev, depths, goals[static_cast<std::size_t>(i)]);
        } catch (...) {
#pragma omp critical
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
    return out;
}

MetricsReport compute_metrics(const AttackGraph& graph, int jobs, std::size_t cap) {
    MetricsReport r;
    r.evidence = attack_evidence(graph, cap);
    r.radius = blast_radius(graph, r.evidence);
    r.goals = analyze_goals(graph, r.evidence, compute_depths(graph), jobs);
    return r;
}

// ---- reports ---------------------------------------------------------------

std::string radius_display(const std::string& cve, std::size_t cardinality) {
    return cve + " (" + std::to_string(cardinality) + ")";
}

std::string metrics_to_json(const AttackGraph& graph, const MetricsReport& report) {
    using nlohmann::json;
    json goals = json::array();
    for (const auto& g : report.goals) {
        json steps = json::array();
        for (const auto& s : g.steps)
            steps.push_back({{"node", s.rule_node}, {"rule", s.rule}, {"derives", to_string(s.derives)}});
        json cats = json::array();
        for (const auto& c : report.evidence.evidence[g.node].cats()) cats.push_back(c.to_string());
        json j{{"goal", to_string(g.goal)}, {"node", g.node}, {"reachable", true}, {"depth", g.depth},
               {"trace", steps}, {"attack_evidence", cats}};
        if (g.patch.patchable) j["patch_set"] = g.patch.cves;
        else j["patch_set"] = "unpatchable by CVE fixes";
        goals.push_back(std::move(j));
    }
    for (const auto& a : graph.protected_goals) goals.push_back({{"goal", to_string(a)}, {"reachable", false}, {"verdict", "protected"}});
    for (const auto& a : graph.trivial_goals)
        goals.push_back({{"goal", to_string(a)}, {"reachable", true}, {"verdict", "true in configuration"}});

    json radius = json::array();
    for (const auto& [cve, nodes] : report.radius) {
        json atoms = json::array();
        for (std::size_t id : nodes) atoms.push_back(to_string(graph.node(id).atom));
        radius.push_back({{"cve", cve}, {"cardinality", nodes.size()}, {"display", radius_display(cve, nodes.size())},
                          {"nodes", atoms}});
    }
    json out{{"universe", report.evidence.universe.cves}, {"goals", goals}, {"blast_radius", radius},
             {"graph", {{"nodes", graph.size()}, {"edges", graph.edge_count()}}}};
    return out.dump(2);
}

std::string metrics_to_text(const AttackGraph& graph, const MetricsReport& report) {
    std::ostringstream out;
    out << "graph: " << graph.size() << " nodes, " << graph.edge_count() << " edges\n";
    for (const auto& g : report.goals) {
        out << "\ngoal " << to_string(g.goal) << ": reachable, depth " << g.depth << '\n';
        for (std::size_t i = 0; i < g.steps.size(); ++i)
            out << "  " << i + 1 << ". " << g.steps[i].rule << " => " << to_string(g.steps[i].derives) << '\n';
        if (!g.patch.patchable) {
            out << "  patch: unpatchable by CVE fixes\n";
        } else {
            out << "  patch:";
            for (const auto& c : g.patch.cves) out << ' ' << c;
            out << '\n';
        }
    }
    for (const auto& a : graph.protected_goals) out << "\ngoal " << to_string(a) << ": protected\n";
    for (const auto& a : graph.trivial_goals) out << "\ngoal " << to_string(a) << ": true in configuration\n";
    if (!report.radius.empty()) {
        out << "\nblast radius:\n";
        for (const auto& [cve, nodes] : report.radius) out << "  " << radius_display(cve, nodes.size()) << '\n';
    }
    return out.str();
}

}  // namespace iota
