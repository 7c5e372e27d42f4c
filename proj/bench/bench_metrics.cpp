// Per-goal analysis: serial reference against the OpenMP version.

#include <benchmark/benchmark.h>

#include <map>

#include "iota/pipeline.hpp"
#include "iota/synth.hpp"

namespace {

struct Fixture {
    iota::AttackGraph graph;
    iota::EvidenceResult evidence;
    std::vector<std::size_t> depths;
};

const Fixture& fixture(std::size_t devices) {
    static std::map<std::size_t, Fixture> cache;
    auto it = cache.find(devices);
    if (it != cache.end()) return it->second;
    iota::CveStore store;
    store.ingest_feed_file(std::string(IOTA_SOURCE_DIR) + "/fixtures/feeds/mini_nvd.json");
    const auto config = iota::synthesize_system(7, devices);
    auto result = iota::run_analysis(config, store);
    Fixture f;
    f.graph = std::move(result.graph);
    f.evidence = iota::attack_evidence(f.graph);
    f.depths = iota::compute_depths(f.graph);
    return cache.emplace(devices, std::move(f)).first->second;
}

void BM_AnalyzeGoalsSerial(benchmark::State& state) {
    const Fixture& f = fixture(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(iota::analyze_goals_serial(f.graph, f.evidence, f.depths));
    state.counters["goals"] = static_cast<double>(f.graph.goals().size());
}

void BM_AnalyzeGoalsParallel(benchmark::State& state) {
    const Fixture& f = fixture(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(iota::analyze_goals(f.graph, f.evidence, f.depths));
    state.counters["goals"] = static_cast<double>(f.graph.goals().size());
}

void BM_AttackEvidence(benchmark::State& state) {
    const Fixture& f = fixture(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(iota::attack_evidence(f.graph));
}

}  // namespace

BENCHMARK(BM_AnalyzeGoalsSerial)->Arg(10)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AnalyzeGoalsParallel)->Arg(10)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AttackEvidence)->Arg(10)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
