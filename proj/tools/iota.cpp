// iota command-line driver.
//
// Exit codes: 0 ok, 1 usage, 2 config error, 3 store error, 4 stage failure,
// 5 a --fail-on-reachable goal was reached.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "iota/errors.hpp"
#include "iota/pipeline.hpp"
#include "iota/synth.hpp"

namespace {

using namespace iota;

constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitStore = 3;
constexpr int kExitStage = 4;
constexpr int kExitReachable = 5;

struct Options {
    std::string config;
    std::string store;
    std::vector<std::string> feeds;
    std::string out;
    std::vector<std::string> goals;
    std::vector<std::string> patched;
    std::vector<std::string> fail_on;
    std::string overrides;
    std::string lexicon;
    std::string format = "text";
    std::string graph;
    std::vector<std::string> ingest_files;
    std::uint64_t seed = 1;
    std::size_t count = 10;
    int jobs = 0;
};

CveStore open_store(const Options& o) {
    CveStore store;
    if (!o.store.empty()) {
        if (std::filesystem::exists(o.store)) store = CveStore::load(o.store);
        else if (o.feeds.empty()) throw StoreError("store '" + o.store + "' does not exist");
    }
    for (const auto& f : o.feeds) store.ingest_feed_file(f);
    if (o.store.empty() && o.feeds.empty()) throw StoreError("no CVE store given (use --store, --feed or IOTA_STORE)");
    return store;
}

SystemConfig open_config(const Options& o) {
    SystemConfig config = load_config(o.config);
    if (!o.goals.empty()) config.goals = o.goals;
    return config;
}

void emit(const Options& o, const std::string& text) {
    if (o.out.empty() || o.out == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(o.out, std::ios::binary);
    if (!out) throw Error("cannot write " + o.out);
    out << text;
}

int cmd_ingest(const Options& o) {
    if (o.store.empty()) throw StoreError("ingest needs --store (or IOTA_STORE)");
    CveStore store;
    if (std::filesystem::exists(o.store)) store = CveStore::load(o.store);
    // Parse everything before touching the store file.
    IngestStats total;
    for (const auto& f : o.ingest_files) {
        const IngestStats s = store.ingest_feed_file(f);
        total.stored += s.stored;
        total.skipped += s.skipped;
    }
    store.save(o.store);
    std::cout << "ingested " << total.stored << " records (" << total.skipped << " skipped); store holds "
              << store.size() << '\n';
    return 0;
}

int cmd_scan(const Options& o) {
    const SystemConfig config = open_config(o);
    const CveStore store = open_store(o);
    std::vector<std::string> warnings;
    std::ostringstream text;
    for (const auto& s : scan_devices(config, store, &warnings)) {
        text << s.device << ':';
        for (const auto& c : s.cves) text << ' ' << c;
        text << '\n';
    }
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
    emit(o, text.str());
    return 0;
}

int cmd_model(const Options& o) {
    const SystemConfig config = open_config(o);
    const CveStore store = open_store(o);
    const ExploitOverrides overrides = o.overrides.empty() ? ExploitOverrides{} : load_overrides(o.overrides);
    const auto scans = scan_devices(config, store);
    const ExploitModels models = build_all_exploit_models(scans, store, config, overrides, o.jobs);
    std::ostringstream text;
    for (const auto& s : scans)
        for (const auto& f : emit_vul_facts(s)) text << to_string(f) << ".\n";
    std::set<Atom> seen;
    for (const auto& m : models.models)
        if (Atom f = vul_property_fact(m); seen.insert(f).second) text << to_string(f) << ".\n";
    for (const auto& w : models.warnings) std::cerr << "warning: " << w.cve_id << " on " << w.device << ": " << w.message << '\n';
    emit(o, text.str());
    return 0;
}

int cmd_extract_apps(const Options& o) {
    const SystemConfig config = open_config(o);
    const Lexicon lexicon = o.lexicon.empty() ? Lexicon::builtin() : Lexicon::load(o.lexicon);
    std::ostringstream text;
    for (const auto& a : process_apps(config, lexicon)) {
        text << a.app_name << ": ";
        if (a.tuple) text << to_string(*a.tuple);
        if (!a.diagnostic_code.empty()) text << (a.tuple ? " " : "") << '[' << a.diagnostic_code << "] " << a.diagnostic;
        text << '\n';
    }
    emit(o, text.str());
    return 0;
}

int cmd_compile(const Options& o) {
    const SystemConfig config = open_config(o);
    const CveStore store = open_store(o);
    const Lexicon lexicon = o.lexicon.empty() ? Lexicon::builtin() : Lexicon::load(o.lexicon);
    const ExploitOverrides overrides = o.overrides.empty() ? ExploitOverrides{} : load_overrides(o.overrides);
    const auto scans = scan_devices(config, store);
    const ExploitModels models = build_all_exploit_models(scans, store, config, overrides, o.jobs);
    const CompiledProgram compiled = compile_program(config, scans, models, process_apps(config, lexicon));
    emit(o, compiled.text);
    return 0;
}

int cmd_analyze(const Options& o) {
    if (o.out.empty()) throw ConfigError("analyze needs --out DIR");
    const SystemConfig config = open_config(o);
    const CveStore store = open_store(o);
    const Lexicon lexicon = o.lexicon.empty() ? Lexicon::builtin() : Lexicon::load(o.lexicon);
    AnalysisOptions options;
    if (!o.overrides.empty()) options.overrides = load_overrides(o.overrides);
    options.patched.insert(o.patched.begin(), o.patched.end());
    options.lexicon = &lexicon;
    options.jobs = o.jobs;
    const AnalysisResult result = run_analysis(config, store, options);
    const std::string store_label = !o.store.empty() ? o.store : (o.feeds.empty() ? "" : o.feeds.front());
    write_artifacts(result, {o.config, store_label, o.out});

    if (o.format == "dot") std::cout << to_dot(result.graph);
    else std::cout << metrics_to_text(result.graph, result.metrics);

    for (const auto& g : o.fail_on) {
        const Atom goal = parse_atom(g);
        if (result.saturation.contains(goal)) {
            std::cerr << "policy: goal " << to_string(goal) << " is reachable\n";
            return kExitReachable;
        }
    }
    return 0;
}

int cmd_synth(const Options& o) {
    emit(o, serialize_config(synthesize_system(o.seed, o.count)));
    return 0;
}

int cmd_metrics(const Options& o) {
    std::ifstream in(o.graph);
    if (!in) throw ConfigError("cannot read graph file '" + o.graph + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    const AttackGraph graph = graph_from_json(buf.str());
    if (o.format == "dot") {
        emit(o, to_dot(graph));
        return 0;
    }
    const MetricsReport report = compute_metrics(graph, o.jobs);
    emit(o, o.format == "json" ? metrics_to_json(graph, report) : metrics_to_text(graph, report));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"IoT attack graph generation and analysis"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand
    Options o;
    if (const char* env = std::getenv("IOTA_STORE")) o.store = env;

    app.add_option("--store", o.store, "CVE store file (default $IOTA_STORE)");
    app.add_option("--feed", o.feeds, "NVD feed to load into an in-memory store (repeatable)");
    app.add_option("--out", o.out, "output file, or directory for analyze");
    app.add_option("--goals", o.goals, "goal atoms, e.g. 'open(ryseWindowOpener)'")->delimiter(';');
    app.add_option("--seed", o.seed, "seed for synth");
    app.add_option("--jobs", o.jobs, "worker threads for parallel stages (0 = default)");
    app.add_option("--format", o.format, "output format")->check(CLI::IsMember({"text", "dot", "json"}));
    app.add_option("--overrides", o.overrides, "JSON file pinning exploit models by cve id");
    app.add_option("--lexicon", o.lexicon, "app-semantics lexicon JSON");

    auto* ingest = app.add_subcommand("ingest", "add NVD feed files to the store");
    ingest->add_option("feeds", o.ingest_files, "feed files (.json or .json.gz)")->required()->check(CLI::ExistingFile);

    auto add_config = [&](CLI::App* sub) { sub->add_option("config", o.config, "system configuration JSON")->required(); };
    auto* scan = app.add_subcommand("scan", "list CVEs per device");
    add_config(scan);
    auto* model = app.add_subcommand("model", "emit vulnerability and exploit model facts");
    add_config(model);
    auto* extract = app.add_subcommand("extract-apps", "print the semantic tuple of every app");
    add_config(extract);
    auto* compile = app.add_subcommand("compile", "emit the logic program");
    add_config(compile);
    auto* analyze = app.add_subcommand("analyze", "run the whole pipeline and write artifacts");
    add_config(analyze);
    analyze->add_option("--patched", o.patched, "cve ids to treat as patched")->delimiter(',');
    analyze->add_option("--fail-on-reachable", o.fail_on, "exit 5 if this goal is reachable (repeatable)");
    auto* synth = app.add_subcommand("synth", "write a synthetic system configuration");
    synth->add_option("--count", o.count, "number of devices")->required();
    auto* metrics = app.add_subcommand("metrics", "recompute metrics from a graph dump");
    metrics->add_option("graph", o.graph, "graph.json written by analyze")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*ingest) return cmd_ingest(o);
        if (*scan) return cmd_scan(o);
        if (*model) return cmd_model(o);
        if (*extract) return cmd_extract_apps(o);
        if (*compile) return cmd_compile(o);
        if (*analyze) return cmd_analyze(o);
        if (*synth) return cmd_synth(o);
        if (*metrics) return cmd_metrics(o);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const StoreError& e) {
        std::cerr << "store error: " << e.what() << '\n';
        return kExitStore;
    } catch (const AppSemanticsError& e) {
        std::cerr << "app-semantics error [" << e.code() << "]: " << e.what() << '\n';
        return kExitStage;
    } catch (const ProgramError& e) {
        std::cerr << "compile error: " << e.what() << '\n';
        return kExitStage;
    } catch (const MetricsError& e) {
        std::cerr << "metrics error: " << e.what() << '\n';
        return kExitStage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitStage;
    }
    return kExitUsage;
}
