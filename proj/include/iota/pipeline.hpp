#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "iota/app_semantics.hpp"
#include "iota/cve_store.hpp"
#include "iota/exploit_model.hpp"
#include "iota/graph_metrics.hpp"
#include "iota/reasoner.hpp"
#include "iota/rule_compiler.hpp"
#include "iota/system_model.hpp"

namespace iota {

struct AnalysisOptions {
    ExploitOverrides overrides;
    std::set<std::string> patched;  // cve ids treated as fixed
    const Lexicon* lexicon = nullptr;
    int jobs = 0;
    std::size_t cat_cap = kDefaultCatCap;
};

struct StageTiming {
    std::string stage;
    double ms = 0.0;
};

struct AnalysisResult {
    std::vector<ScanResult> scans;
    std::vector<std::string> scan_warnings;
    ExploitModels models;
    CompiledProgram compiled;
    SaturationResult saturation;
    AttackGraph graph;
    MetricsReport metrics;
    std::vector<StageTiming> timings;
};

// One CVE query per device, by its model name.
std::vector<ScanResult> scan_devices(const SystemConfig& config, const CveStore& store,
                                     std::vector<std::string>* warnings = nullptr);

// Runs every stage in order; stage errors propagate as iota::Error.
AnalysisResult run_analysis(const SystemConfig& config, const CveStore& store, const AnalysisOptions& options = {});

// Peak resident set size of this process in kilobytes.
long peak_rss_kb();

struct ManifestPaths {
    std::string config;
    std::string store;
    std::string out_dir;
};

std::string manifest_json(const AnalysisResult& result, const ManifestPaths& paths);

// program.pl, graph.json, graph.dot, metrics.json, manifest.json
void write_artifacts(const AnalysisResult& result, const ManifestPaths& paths);

}  // namespace iota
