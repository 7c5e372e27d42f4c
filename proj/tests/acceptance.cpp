// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <json.hpp>

#include "iota/app_semantics.hpp"
#include "iota/exploit_model.hpp"
#include "iota/graph_metrics.hpp"
#include "iota/pipeline.hpp"
#include "iota/rule_compiler.hpp"
#include "iota/synth.hpp"
#include "test_support.hpp"
#include "trace_oracle.hpp"

namespace fs = std::filesystem;
using namespace iota;
using iota::test::fixture_config;
using iota::test::fixture_store;
using iota::test::read_file;
using iota::test::source_path;

namespace {

// Pinned budgets.
constexpr double kFactsBudgetMs = 1000.0;
constexpr double kCaseStudyBudgetMs = 2000.0;
constexpr double kScaleWallBudgetMs = 5000.0;
constexpr long kScalePeakBudgetKb = 500L * 1024;
constexpr double kScaleMaxExponent = 2.0;
constexpr double kScaleMinSampleMs = 200.0;
constexpr std::size_t kScaleDevices = 50;
constexpr std::uint64_t kScaleSeed = 2024;
constexpr std::size_t kRandomGraphs = 1500;
constexpr std::size_t kRandomTriples = 12000;
constexpr double kCorpusRequiredScore = 1.0;

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

struct Outcome {
    bool pass = true;
    std::string detail;
    std::vector<std::string> failures;

    void expect(bool ok, const std::string& what) {
        if (ok) return;
        pass = false;
        if (failures.size() < 8) failures.push_back(what);
    }
};

AnalysisResult analyze_fixture(const std::string& name, std::set<std::string> patched = {}) {
    AnalysisOptions options;
    options.patched = std::move(patched);
    return run_analysis(load_config(fixture_config(name)), fixture_store(), options);
}

const GoalReport* find_goal(const AnalysisResult& r, const std::string& goal) {
    const Atom want = parse_atom(goal);
    for (const auto& g : r.metrics.goals)
        if (g.goal == want) return &g;
    return nullptr;
}

// ---- 1: config facts ---------------------------------------------------------

Outcome config_fact_fidelity() {
    Outcome o;
    const std::string expected =
        "router(dLinkRouter).\n"
        "inNetwork(dLinkRouter, wifi1).\n"
        "\n"
        "gateway(smartthingsHub).\n"
        "inNetwork(smartthingsHub, wifi1).\n"
        "inNetwork(smartthingsHub, zigbee1).\n"
        "\n"
        "wifi(wifi1).\n"
        "zigbee(zigbee1).\n";
    const auto start = Clock::now();
    const SystemConfig config = load_config(fixture_config("router_hub"));
    const std::string text = format_config_facts(config);
    const std::size_t clauses = emit_config_facts(config).size();
    const double ms = ms_since(start);
    o.expect(text == expected, "fact text differs:\n" + text);
    // The reference text holds 7 clauses; the count is taken from it rather than assumed.
    const auto reference_clauses = static_cast<std::size_t>(std::count(expected.begin(), expected.end(), '.'));
    o.expect(clauses == reference_clauses, "clause count " + std::to_string(clauses) + ", reference has " +
                                               std::to_string(reference_clauses));
    o.expect(ms < kFactsBudgetMs, "took " + std::to_string(ms) + " ms");
    o.detail = std::to_string(clauses) + " clauses, " + std::to_string(ms) + " ms";
    return o;
}

// ---- 2: exploit model --------------------------------------------------------

Outcome exploit_model_fidelity() {
    Outcome o;
    const SystemConfig config = load_config(fixture_config("router_hub"));
    const ScanResult scan = fixture_store().search_device("dLinkRouter", "D-Link Router");
    const auto vul = emit_vul_facts(scan);
    o.expect(vul.size() == 1 && to_string(vul.front()) == "vulExists(dLinkRouter, 'CVE-2020-8864')",
             "vulExists facts: " + std::to_string(vul.size()));
    const ExploitModels models = build_exploit_models(scan, fixture_store(), config);
    std::set<std::string> props;
    for (const auto& m : models.models) props.insert(to_string(vul_property_fact(m)));
    const std::string want = "vulProperty('CVE-2020-8864', wifiAdjacentLogically, rootPrivilege)";
    o.expect(props == std::set<std::string>{want},
             "vulProperty facts: " + (props.empty() ? std::string("none") : *props.begin()));
    o.detail = want;
    return o;
}

// ---- 3: app semantics --------------------------------------------------------

Outcome app_semantics_fidelity() {
    Outcome o;
    const std::string sentence = "Turn on the hall light if someone comes home and the door opens.";
    const ClauseSplit clauses = split_clauses(sentence);
    const std::string cond = to_string(split_conjuncts(clauses.conditional));
    const std::string main = to_string(split_conjuncts(clauses.main));
    o.expect(cond == "('AND', ['someone comes home', 'the door opens'])", "conditional split " + cond);
    o.expect(main == "('NONE', ['Turn on the hall light'])", "main split " + main);

    const std::vector<std::pair<std::string, std::pair<std::string, std::string>>> phrases = {
        {"someone comes home", {"someone", "comes"}},
        {"the door opens", {"the door", "opens"}},
        {"Turn on the hall light", {"the hall light", "Turn on"}},
    };
    for (const auto& [simple, want] : phrases) {
        const Phrases p = extract_phrases(simple);
        o.expect(p.noun_phrase == want.first && p.verb_phrase == want.second,
                 "phrases of '" + simple + "': " + p.noun_phrase + " | " + p.verb_phrase);
    }

    const SystemConfig config = load_config(fixture_config("hall_light"));
    const AppSpec& app = config.apps.at(0);
    const SemanticTuple tuple = extract_semantics(app.description);
    const std::string tuple_text = to_string(tuple);
    o.expect(tuple_text == "('AND', ['motion sensor', 'door contact sensor'], ['motion', 'open'], 'NONE', ['bulb'], ['on'])",
             "tuple " + tuple_text);

    // Rule shape: on(B) :- bulb(B), reportsMotion(M), motionSensor(M), open(C), doorContactSensor(C).
    const auto rules = emit_app_rules(bind_app(tuple, app, config), config);
    o.expect(rules.size() == 1, "app rule count " + std::to_string(rules.size()));
    if (rules.size() == 1) {
        const HornRule& r = rules.front();
        std::vector<std::string> preds;
        for (const auto& a : r.body) preds.push_back(a.predicate);
        const std::vector<std::string> want{"bulb", "reportsMotion", "motionSensor", "open", "doorContactSensor"};
        o.expect(r.head.predicate == "on" && r.head.args.size() == 1, "head " + to_string(r.head));
        o.expect(preds == want, "body " + to_string(r));
        if (preds == want && r.head.args.size() == 1) {
            auto arg = [&](std::size_t i) { return r.body[i].args.at(0); };
            o.expect(r.head.args[0] == arg(0), "head and bulb guard disagree");
            o.expect(arg(1) == arg(2), "motion event and guard disagree");
            o.expect(arg(3) == arg(4), "open event and guard disagree");
            o.expect(!(arg(0) == arg(1)) && !(arg(1) == arg(3)) && !(arg(0) == arg(3)), "roles collapse");
        }
        std::string shape = to_string(r.head) + " :-";
        for (const auto& a : r.body) shape += " " + to_string(a);
        o.detail = shape;
    }
    return o;
}

// ---- 4: window chain -----------------------------------------------------------

// Rule nodes of a trace in trace order, described by app label or exploited cve.
std::vector<std::string> trace_rule_tags(const AttackGraph& g, const AttackTrace& t) {
    std::vector<std::string> tags;
    for (const auto& tn : t.nodes) {
        const GraphNode& n = g.node(tn.node);
        if (n.kind != NodeKind::Rule) continue;
        std::string tag = n.label;
        for (std::size_t p : n.parents) {
            const GraphNode& parent = g.node(p);
            if (parent.kind == NodeKind::PrimitiveFact && parent.atom.predicate == "vulExists")
                tag = parent.atom.args.at(1).name;
        }
        tags.push_back(tag);
    }
    return tags;
}

Outcome case_study_reachability() {
    Outcome o;
    const auto start = Clock::now();
    const AnalysisResult r = analyze_fixture("window_chain");
    const double ms = ms_since(start);
    const GoalReport* goal = find_goal(r, "open(ryseWindowOpener)");
    o.expect(goal != nullptr, "open(ryseWindowOpener) is not reachable");
    if (goal) {
        const auto tags = trace_rule_tags(r.graph, goal->trace);
        auto pos = [&](const std::string& tag) {
            return static_cast<std::size_t>(std::find(tags.begin(), tags.end(), tag) - tags.begin());
        };
        const std::vector<std::string> order{"CVE-2019-17098", "CVE-2019-3949", "Preheat oven", "Open window on smoke"};
        for (std::size_t i = 0; i < order.size(); ++i) {
            o.expect(pos(order[i]) < tags.size(), "trace misses " + order[i]);
            if (i) o.expect(pos(order[i - 1]) < pos(order[i]), order[i - 1] + " does not precede " + order[i]);
        }
        o.detail = "depth " + std::to_string(goal->depth) + ", " + std::to_string(ms) + " ms";
    }
    o.expect(ms < kCaseStudyBudgetMs, "took " + std::to_string(ms) + " ms");
    return o;
}

// ---- 5: two routes to the lock -----------------------------------------------

Outcome lock_routes() {
    Outcome o;
    const AnalysisResult r = analyze_fixture("lock_routes");
    const auto goal = r.graph.find(parse_atom("unlock(augustSmartLock)"));
    o.expect(goal.has_value(), "unlock(augustSmartLock) not in the graph");
    if (!goal) return o;
    const auto traces = oracle::enumerate_traces(r.graph, *goal);
    auto has_label = [&](const oracle::SubgraphTrace& t, const std::string& label) {
        return std::any_of(t.nodes.begin(), t.nodes.end(), [&](std::size_t v) {
            return r.graph.node(v).kind == NodeKind::Rule && r.graph.node(v).label == label;
        });
    };
    const bool voice = std::any_of(traces.begin(), traces.end(), [&](const auto& t) {
        return has_label(t, "August Alexa skill") && !has_label(t, "Smoke unlock");
    });
    const bool smoke = std::any_of(traces.begin(), traces.end(), [&](const auto& t) {
        return has_label(t, "Smoke unlock") && has_label(t, "Preheat oven");
    });
    std::set<std::size_t> chosen;
    for (const auto& t : traces) chosen.insert(t.choice.at(*goal));
    const auto& parents = r.graph.node(*goal).parents;
    o.expect(traces.size() >= 2, "only " + std::to_string(traces.size()) + " traces");
    o.expect(voice, "no trace through the voice skill alone");
    o.expect(smoke, "no trace through the oven smoke app");
    o.expect(chosen == std::set<std::size_t>(parents.begin(), parents.end()),
             "some rule into the goal starts no trace");
    o.detail = std::to_string(traces.size()) + " traces, " + std::to_string(parents.size()) + " rules into the goal";
    return o;
}

// ---- 6: metrics against brute force ------------------------------------------

Outcome oracle_equivalence() {
    Outcome o;
    std::mt19937_64 rng(0x5eed0006);
    std::size_t goals_checked = 0;
    for (std::size_t round = 0; round < kRandomGraphs; ++round) {
        const AttackGraph g = oracle::random_dag(rng);
        const std::string where = "graph " + std::to_string(round);
        if (g.size() > 12) o.expect(false, where + " has " + std::to_string(g.size()) + " nodes");
        const EvidenceResult ev = attack_evidence(g);
        if (ev.universe.cves.size() > 4) o.expect(false, where + " has too many vulnerabilities");
        const auto depths = compute_depths(g);

        BlastRadius br = blast_radius(g, ev);
        std::map<std::string, std::set<std::size_t>> got_br;
        for (const auto& [cve, nodes] : br) got_br[cve] = {nodes.begin(), nodes.end()};
        o.expect(got_br == oracle::blast_radius(g), where + ": blast radius differs");

        for (std::size_t goal : g.goals()) {
            ++goals_checked;
            const std::string at = where + " node " + std::to_string(goal);
            const auto traces = oracle::enumerate_traces(g, goal);
            std::size_t best = kUnreachable;
            oracle::CatFamily trace_cats;
            for (const auto& t : traces) {
                best = std::min(best, t.depth);
                trace_cats.insert(t.cves);
            }
            o.expect(depths[goal] == best, at + ": depth " + std::to_string(depths[goal]) + " vs " + std::to_string(best));
            if (best != kUnreachable) {
                const AttackTrace trace = shortest_trace(g, goal, depths);
                const std::string bad = oracle::check_trace(g, trace);
                o.expect(bad.empty(), at + ": " + bad);
                o.expect(trace.depth == best, at + ": trace depth differs");
            }
            const oracle::CatFamily family = oracle::to_family(ev.evidence[goal], ev.universe);
            o.expect(family == oracle::derivation_tree_cats(g, goal), at + ": evidence differs from tree unfoldings");
            o.expect(oracle::minimal(family) == oracle::minimal(trace_cats), at + ": minimal CATs differ from traces");
        }
    }
    o.detail = std::to_string(kRandomGraphs) + " graphs, " + std::to_string(goals_checked) + " goals";
    return o;
}

// ---- 7: evidence algebra -----------------------------------------------------

Outcome algebraic_properties() {
    Outcome o;
    std::mt19937_64 rng(0x5eed0007);
    const std::vector<std::size_t> universes{3, 6, 64, 70, 130};
    auto random_evidence = [&](std::size_t universe) {
        std::vector<Cat> cats;
        const std::size_t n = rng() % 5;
        for (std::size_t i = 0; i < n; ++i) {
            Cat c(universe);
            for (std::size_t b = 0; b < universe; ++b)
                if (rng() % 4 == 0) c.set(b);
            cats.push_back(std::move(c));
        }
        return AttackEvidence(std::move(cats));
    };
    std::size_t violations = 0;
    for (std::size_t i = 0; i < kRandomTriples; ++i) {
        const std::size_t u = universes[i % universes.size()];
        const AttackEvidence a = random_evidence(u), b = random_evidence(u), c = random_evidence(u);
        const AttackEvidence zero(std::vector<Cat>{Cat(u)});
        auto check = [&](bool ok, const std::string& what) {
            if (!ok) ++violations;
            o.expect(ok, what + " (triple " + std::to_string(i) + ")");
        };
        check(merge_ae_or(a, a) == a, "OR idempotence");
        check(merge_ae_or(a, b) == merge_ae_or(b, a), "OR commutativity");
        check(merge_ae_or(merge_ae_or(a, b), c) == merge_ae_or(a, merge_ae_or(b, c)), "OR associativity");
        check(merge_ae_and(a, b) == merge_ae_and(b, a), "AND commutativity");
        check(merge_ae_and(merge_ae_and(a, b), c) == merge_ae_and(a, merge_ae_and(b, c)), "AND associativity");
        check(merge_ae_and(a, zero) == a && merge_ae_and(zero, a) == a, "AND zero identity");
    }
    o.detail = std::to_string(kRandomTriples) + " triples, " + std::to_string(violations) + " violations";
    return o;
}

// ---- 8: patch sets -----------------------------------------------------------

Outcome patch_soundness() {
    Outcome o;
    struct Subject {
        std::string name;
        SystemConfig config;
    };
    std::vector<Subject> subjects;
    for (const char* f : {"router_hub", "hall_light", "window_chain", "lock_routes", "voice_home", "quiet"})
        subjects.push_back({f, load_config(fixture_config(f))});
    for (std::uint64_t seed : {11, 12, 13}) subjects.push_back({"synth" + std::to_string(seed), synthesize_system(seed, 15)});

    std::size_t checked = 0, unpatchable = 0;
    for (const auto& s : subjects) {
        auto run = [&](const std::set<std::string>& patched) {
            AnalysisOptions options;
            options.patched = patched;
            return run_analysis(s.config, fixture_store(), options);
        };
        const AnalysisResult base = run({});
        std::map<std::set<std::string>, SaturationResult> cache;
        auto saturation_for = [&](const std::set<std::string>& patched) -> const SaturationResult& {
            auto it = cache.find(patched);
            if (it == cache.end()) it = cache.emplace(patched, run(patched).saturation).first;
            return it->second;
        };
        std::set<std::string> every_cve;
        for (const auto& scan : base.scans) every_cve.insert(scan.cves.begin(), scan.cves.end());

        for (const auto& g : base.metrics.goals) {
            const std::string at = s.name + " " + to_string(g.goal);
            if (!g.patch.patchable) {
                // No vulnerability stands between the attacker and this goal.
                ++unpatchable;
                o.expect(saturation_for(every_cve).contains(g.goal), at + ": claimed unpatchable but needs a cve");
                continue;
            }
            ++checked;
            const std::set<std::string> patched(g.patch.cves.begin(), g.patch.cves.end());
            o.expect(!saturation_for(patched).contains(g.goal), at + ": still reachable after patching");
        }
    }
    o.detail = std::to_string(checked) + " patchable goals blocked, " + std::to_string(unpatchable) +
               " reachable without any cve";
    o.expect(checked > 0, "no patchable goal in the fixture suite");
    return o;
}

// ---- 9: scalability ----------------------------------------------------------

Outcome scalability() {
    Outcome o;
    const fs::path dir = fs::temp_directory_path() / ("iota-accept-" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const std::string cli = IOTA_CLI_PATH;
    const std::string sys = (dir / "synth50.json").string();
    const std::string out = (dir / "out").string();
    const std::string synth_cmd = "\"" + cli + "\" synth --count " + std::to_string(kScaleDevices) + " --seed " +
                                  std::to_string(kScaleSeed) + " --out \"" + sys + "\"";
    const std::string analyze_cmd = "\"" + cli + "\" analyze \"" + sys + "\" --feed \"" + iota::test::fixture_feed() +
                                    "\" --out \"" + out + "\" > /dev/null";
    const auto start = Clock::now();
    const int synth_rc = std::system(synth_cmd.c_str());
    const int analyze_rc = std::system(analyze_cmd.c_str());
    const double wall = ms_since(start);
    o.expect(synth_rc == 0 && analyze_rc == 0, "cli failed");
    long peak = -1;
    if (analyze_rc == 0) peak = nlohmann::json::parse(read_file(out + "/manifest.json")).at("peak_rss_kb").get<long>();
    o.expect(wall < kScaleWallBudgetMs, "wall " + std::to_string(wall) + " ms");
    o.expect(peak > 0 && peak < kScalePeakBudgetKb, "peak " + std::to_string(peak) + " kB");
    fs::remove_all(dir);

    // CPU time per analysis, averaged over enough repetitions to be measurable.
    std::vector<double> xs, ys;
    std::ostringstream series;
    for (std::size_t n : {10, 20, 30, 40, 50}) {
        const SystemConfig config = synthesize_system(kScaleSeed, n);
        std::size_t reps = 0;
        const std::clock_t c0 = std::clock();
        double spent = 0;
        do {
            const AnalysisResult r = run_analysis(config, fixture_store(), {});
            ++reps;
            spent = 1000.0 * static_cast<double>(std::clock() - c0) / CLOCKS_PER_SEC;
        } while (spent < kScaleMinSampleMs);
        const double per_run = spent / static_cast<double>(reps);
        xs.push_back(std::log(static_cast<double>(n)));
        ys.push_back(std::log(per_run));
        series << ' ' << n << ':' << per_run;
    }
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    const double slope = sxy / sxx;
    o.expect(slope < kScaleMaxExponent, "cpu exponent " + std::to_string(slope));
    std::ostringstream d;
    d.precision(3);
    d << "50 devices " << wall << " ms wall, " << peak / 1024 << " MB peak; cpu ms" << series.str() << "; exponent "
      << slope;
    o.detail = d.str();
    return o;
}

// ---- 10: classification corpus and determinism -------------------------------

AttackVector vector_from(const std::string& s) {
    if (s == "ADJACENT_NETWORK") return AttackVector::Adjacent;
    if (s == "LOCAL") return AttackVector::Local;
    if (s == "PHYSICAL") return AttackVector::Physical;
    return AttackVector::Network;
}

Impact impact_from(const std::string& s) {
    if (s == "HIGH") return Impact::High;
    if (s == "LOW") return Impact::Low;
    return Impact::None;
}

std::string manifest_without_measurements(const std::string& text) {
    nlohmann::json m = nlohmann::json::parse(text);
    m.erase("timings_ms");
    m.erase("peak_rss_kb");
    m.erase("out");
    return m.dump();
}

Outcome corpus_and_determinism() {
    Outcome o;
    const auto corpus = nlohmann::json::parse(read_file(source_path("fixtures/classification/corpus.json")));
    std::size_t total = 0, right = 0;
    for (const auto& item : corpus.at("items")) {
        CveRecord rec;
        rec.cve_id = item.at("id");
        rec.description = item.at("description");
        rec.attack_vector = vector_from(item.at("attack_vector"));
        rec.conf_impact = impact_from(item.at("confidentiality"));
        rec.integ_impact = impact_from(item.at("integrity"));
        rec.avail_impact = impact_from(item.at("availability"));
        const auto protocol = parse_protocol(item.at("protocol").get<std::string>());
        const auto want_pre = parse_precondition_kind(item.at("expected_precondition").get<std::string>());
        const auto want_eff = parse_effect_kind(item.at("expected_effect").get<std::string>());
        o.expect(protocol && want_pre && want_eff, rec.cve_id + ": malformed corpus entry");
        ++total;
        const bool pre_ok = want_pre && classify_precondition(rec, protocol) == *want_pre;
        const bool eff_ok = want_eff && classify_effect(rec) == *want_eff;
        o.expect(pre_ok, rec.cve_id + ": precondition " + std::string(to_string(classify_precondition(rec, protocol))));
        o.expect(eff_ok, rec.cve_id + ": effect " + std::string(to_string(classify_effect(rec))));
        if (pre_ok && eff_ok) ++right;
    }
    const double score = total ? static_cast<double>(right) / static_cast<double>(total) : 0.0;
    o.expect(total == 25, "corpus holds " + std::to_string(total) + " items");
    o.expect(score >= kCorpusRequiredScore, "score " + std::to_string(score));

    const fs::path dir = fs::temp_directory_path() / ("iota-determinism-" + std::to_string(::getpid()));
    const SystemConfig config = load_config(fixture_config("voice_home"));
    for (const char* run : {"a", "b"}) {
        AnalysisOptions options;
        options.jobs = run[0] == 'a' ? 1 : 4;
        write_artifacts(run_analysis(config, fixture_store(), options), {"voice_home.json", "feed", (dir / run).string()});
    }
    for (const char* file : {"program.pl", "graph.json", "graph.dot", "metrics.json"})
        o.expect(read_file((dir / "a" / file).string()) == read_file((dir / "b" / file).string()),
                 std::string(file) + " differs between runs");
    o.expect(manifest_without_measurements(read_file((dir / "a" / "manifest.json").string())) ==
                 manifest_without_measurements(read_file((dir / "b" / "manifest.json").string())),
             "manifest differs between runs");
    fs::remove_all(dir);
    o.detail = std::to_string(right) + "/" + std::to_string(total) + " labels; artifacts byte-identical across runs";
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"1 config fact fidelity", config_fact_fidelity},
        {"2 exploit-model fidelity", exploit_model_fidelity},
        {"3 app-semantics fidelity", app_semantics_fidelity},
        {"4 case-study reachability", case_study_reachability},
        {"5 two attack routes to the lock", lock_routes},
        {"6 oracle equivalence", oracle_equivalence},
        {"7 algebraic properties", algebraic_properties},
        {"8 patch-set soundness", patch_soundness},
        {"9 scalability", scalability},
        {"10 classification corpus and determinism", corpus_and_determinism},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o.pass = false;
            o.failures.push_back(std::string("exception: ") + e.what());
        }
        std::cout << (o.pass ? "PASS " : "FAIL ") << name;
        if (!o.detail.empty()) std::cout << " - " << o.detail;
        std::cout << '\n';
        for (const auto& f : o.failures) std::cout << "    " << f << '\n';
        if (!o.pass) ++failed;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
    return failed ? 1 : 0;
}
