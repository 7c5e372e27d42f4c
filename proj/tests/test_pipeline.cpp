#include <gtest/gtest.h>

#include <filesystem>
#include <set>

#include <unistd.h>

#include <json.hpp>

#include "iota/errors.hpp"
#include "iota/pipeline.hpp"
#include "iota/synth.hpp"
#include "test_support.hpp"

using namespace iota;
using nlohmann::json;

namespace {

AnalysisResult analyze(const std::string& fixture, int jobs = 1) {
    AnalysisOptions o;
    o.jobs = jobs;
    return run_analysis(load_config(iota::test::fixture_config(fixture)), iota::test::fixture_store(), o);
}

}  // namespace

TEST(Pipeline, ManifestCounts) {
    const AnalysisResult r = analyze("router_hub");
    const json m = json::parse(manifest_json(r, {"cfg.json", "store.json", "out"}));
    const json& c = m.at("counts");
    EXPECT_EQ(c.at("devices"), 2);
    EXPECT_EQ(c.at("cves"), 5);
    EXPECT_EQ(c.at("apps"), 0);
    EXPECT_EQ(c.at("facts"), r.compiled.program.facts.size());
    EXPECT_EQ(c.at("rules"), r.compiled.program.rules.size());
    EXPECT_EQ(c.at("nodes"), r.graph.size());
    EXPECT_EQ(c.at("edges"), r.graph.edge_count());
    EXPECT_EQ(m.at("config"), "cfg.json");
    EXPECT_GT(m.at("peak_rss_kb").get<long>(), 0);
    for (const char* stage : {"scan", "model", "extract-apps", "compile", "saturate", "graph", "metrics", "total"})
        EXPECT_TRUE(m.at("timings_ms").contains(stage)) << stage;
}

TEST(Pipeline, AppDiagnosticsReachTheManifest) {
    SystemConfig config = load_config(iota::test::fixture_config("hall_light"));
    config.apps.push_back(AppSpec{"Vague", "Make the house nice.", {{"bulb", "hueWifiBulb"}}});
    const AnalysisResult r = run_analysis(config, iota::test::fixture_store());
    const json m = json::parse(manifest_json(r, {}));
    EXPECT_EQ(m.at("counts").at("apps"), 2);
    EXPECT_EQ(m.at("counts").at("apps_bound"), 1);
    ASSERT_EQ(m.at("app_diagnostics").size(), 1u);
    EXPECT_EQ(m.at("app_diagnostics")[0].at("app"), "Vague");
}

TEST(Pipeline, DeterministicAcrossJobCounts) {
    const AnalysisResult a = analyze("voice_home", 1);
    const AnalysisResult b = analyze("voice_home", 3);
    EXPECT_EQ(a.compiled.text, b.compiled.text);
    EXPECT_EQ(to_json(a.graph), to_json(b.graph));
    EXPECT_EQ(metrics_to_json(a.graph, a.metrics), metrics_to_json(b.graph, b.metrics));
}

TEST(Pipeline, PatchingEveryCveRemovesExploits) {
    const SystemConfig config = load_config(iota::test::fixture_config("router_hub"));
    const AnalysisResult before = run_analysis(config, iota::test::fixture_store());
    ASSERT_TRUE(before.graph.find(atom("attackerRoot", {"dLinkRouter"})).has_value());
    AnalysisOptions o;
    for (const auto& s : before.scans) o.patched.insert(s.cves.begin(), s.cves.end());
    const AnalysisResult after = run_analysis(config, iota::test::fixture_store(), o);
    EXPECT_TRUE(after.graph.goals().empty());
    for (const auto& f : after.compiled.program.facts) EXPECT_NE(f.predicate, "vulExists") << to_string(f);
}

TEST(Pipeline, WritesArtifacts) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / ("iota-pipeline-" + std::to_string(::getpid()));
    const AnalysisResult r = analyze("hall_light");
    write_artifacts(r, {"c", "s", dir.string()});
    for (const char* f : {"program.pl", "graph.json", "graph.dot", "metrics.json", "manifest.json"})
        EXPECT_TRUE(fs::exists(dir / f)) << f;
    const AttackGraph back = graph_from_json(iota::test::read_file((dir / "graph.json").string()));
    EXPECT_EQ(back.size(), r.graph.size());
    EXPECT_EQ(iota::test::read_file((dir / "program.pl").string()), r.compiled.text);
    fs::remove_all(dir);
}

TEST(Synth, DeterministicPerSeed) {
    EXPECT_EQ(serialize_config(synthesize_system(42, 30)), serialize_config(synthesize_system(42, 30)));
    EXPECT_NE(serialize_config(synthesize_system(42, 30)), serialize_config(synthesize_system(43, 30)));
}

TEST(Synth, CountBounds) {
    EXPECT_THROW(synthesize_system(1, 0), ConfigError);
    EXPECT_THROW(synthesize_system(1, kSynthMaxDevices + 1), ConfigError);
    EXPECT_EQ(synthesize_system(1, kSynthMinDevices).devices.size(), kSynthMinDevices);
    EXPECT_EQ(synthesize_system(1, kSynthMaxDevices).devices.size(), kSynthMaxDevices);
}

TEST(Synth, AThirdOfDevicesStayUnattached) {
    for (std::size_t n : {1u, 2u, 7u, 30u, 100u}) {
        const SystemConfig c = synthesize_system(2024, n);
        std::set<std::string> attached;
        for (const auto& a : c.apps)
            for (const auto& [role, device] : a.device_map) attached.insert(device);
        EXPECT_GE(c.devices.size() - attached.size(), (n + 2) / 3) << n;
    }
}

TEST(Synth, ValidAndAnalyzable) {
    const SystemConfig c = synthesize_system(7, 25);
    EXPECT_EQ(parse_config(serialize_config(c)), c);
    const AnalysisResult r = run_analysis(c, iota::test::fixture_store());
    for (const auto& a : r.compiled.apps) EXPECT_TRUE(a.rule.has_value()) << a.app_name << ": " << a.diagnostic;
    EXPECT_FALSE(r.graph.goals().empty());
}
