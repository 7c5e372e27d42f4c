#include "iota/pipeline.hpp"

#include <sys/resource.h>

#include <chrono>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "iota/errors.hpp"

namespace iota {

namespace {

class StageClock {
public:
    explicit StageClock(std::vector<StageTiming>& out) : out_(out) {}

    template <typename F>
    auto run(const char* stage, F&& f) {
        const auto start = std::chrono::steady_clock::now();
        struct Record {
            std::vector<StageTiming>& out;
            const char* stage;
            std::chrono::steady_clock::time_point start;
            ~Record() {
                const auto end = std::chrono::steady_clock::now();
                out.push_back({stage, std::chrono::duration<double, std::milli>(end - start).count()});
            }
        } record{out_, stage, start};
        return f();
    }

private:
    std::vector<StageTiming>& out_;
};

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
    if (!out) throw Error("failed writing " + path.string());
}

}  // namespace

std::vector<ScanResult> scan_devices(const SystemConfig& config, const CveStore& store,
                                     std::vector<std::string>* warnings) {
    std::vector<ScanResult> out;
    for (const auto& d : config.devices) {
        try {
            out.push_back(store.search_device(d.name, d.model));
        } catch (const StoreError& e) {
            if (warnings) warnings->push_back(d.name + ": " + e.what());
            out.push_back({d.name, {}});
        }
    }
    return out;
}

AnalysisResult run_analysis(const SystemConfig& config, const CveStore& store, const AnalysisOptions& options) {
    AnalysisResult r;
    StageClock clock(r.timings);
    const Lexicon& lexicon = options.lexicon ? *options.lexicon : Lexicon::builtin();
    const auto start = std::chrono::steady_clock::now();

    r.scans = clock.run("scan", [&] {
        auto scans = scan_devices(config, store, &r.scan_warnings);
        for (auto& s : scans)
            std::erase_if(s.cves, [&](const std::string& c) { return options.patched.count(c) > 0; });
        return scans;
    });
    r.models = clock.run("model", [&] {
        return build_all_exploit_models(r.scans, store, config, options.overrides, options.jobs);
    });
    auto apps = clock.run("extract-apps", [&] { return process_apps(config, lexicon); });
    r.compiled = clock.run("compile", [&] { return compile_program(config, r.scans, r.models, std::move(apps)); });
    r.saturation = clock.run("saturate", [&] { return saturate(r.compiled.program); });
    r.graph = clock.run("graph", [&] {
        AttackGraph g = build_attack_graph(r.saturation, r.compiled.program, r.compiled.goals);
        g.validate();
        return g;
    });
    r.metrics = clock.run("metrics", [&] { return compute_metrics(r.graph, options.jobs, options.cat_cap); });

    const auto end = std::chrono::steady_clock::now();
    r.timings.push_back({"total", std::chrono::duration<double, std::milli>(end - start).count()});
    return r;
}

long peak_rss_kb() {
    rusage usage{};
    if (getrusage(RUSAGE_SELF, &usage) != 0) return -1;
    return usage.ru_maxrss;
}

std::string manifest_json(const AnalysisResult& r, const ManifestPaths& paths) {
    using nlohmann::json;
    std::set<std::string> cves;
    for (const auto& s : r.scans) cves.insert(s.cves.begin(), s.cves.end());
    std::size_t apps_bound = 0;
    json diagnostics = json::array();
    for (const auto& a : r.compiled.apps) {
        if (a.rule) ++apps_bound;
        else diagnostics.push_back({{"app", a.app_name}, {"code", a.diagnostic_code}, {"message", a.diagnostic}});
    }
    json warnings = json::array();
    for (const auto& w : r.models.warnings) warnings.push_back({{"cve", w.cve_id}, {"device", w.device}, {"message", w.message}});
    for (const auto& w : r.scan_warnings) warnings.push_back({{"message", w}});
    json timings = json::object();
    for (const auto& t : r.timings) timings[t.stage] = t.ms;

    json counts{
        {"devices", r.scans.size()},
        {"cves", cves.size()},
        {"exploit_models", r.models.models.size()},
        {"apps", r.compiled.apps.size()},
        {"apps_bound", apps_bound},
        {"facts", r.compiled.program.facts.size()},
        {"rules", r.compiled.program.rules.size()},
        {"firings", r.saturation.firings.size()},
        {"nodes", r.graph.size()},
        {"edges", r.graph.edge_count()},
        {"goals", r.compiled.goals.size()},
        {"goals_reached", r.graph.goals().size() + r.graph.trivial_goals.size()},
    };
    json out{{"config", paths.config},          {"store", paths.store},    {"out", paths.out_dir},
             {"timings_ms", timings},           {"peak_rss_kb", peak_rss_kb()}, {"counts", counts},
             {"app_diagnostics", diagnostics},  {"warnings", warnings}};
    return out.dump(2);
}

void write_artifacts(const AnalysisResult& r, const ManifestPaths& paths) {
    namespace fs = std::filesystem;
    const fs::path dir(paths.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory " + paths.out_dir + ": " + ec.message());
    write_file(dir / "program.pl", r.compiled.text);
    write_file(dir / "graph.json", to_json(r.graph));
    write_file(dir / "graph.dot", to_dot(r.graph));
    write_file(dir / "metrics.json", metrics_to_json(r.graph, r.metrics));
    write_file(dir / "manifest.json", manifest_json(r, paths));
}

}  // namespace iota
