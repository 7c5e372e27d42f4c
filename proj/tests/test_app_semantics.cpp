#include <gtest/gtest.h>

#include <functional>

#include "iota/app_semantics.hpp"
#include "iota/errors.hpp"
#include "test_support.hpp"

using namespace iota;

namespace {

std::string code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const AppSemanticsError& e) {
        return e.code();
    }
    return "";
}

}  // namespace

TEST(SplitClauses, MarkerInMiddleOrFront) {
    const ClauseSplit a = split_clauses("Turn on the light when motion is detected.");
    EXPECT_EQ(a.conditional, "motion is detected");
    EXPECT_EQ(a.main, "Turn on the light");
    const ClauseSplit b = split_clauses("If smoke is detected, open the window.");
    EXPECT_EQ(b.conditional, "smoke is detected");
    EXPECT_EQ(b.main, "open the window");
}

TEST(SplitClauses, HallLightWording) {
    const ClauseSplit s = split_clauses("Turn on the hall light if           there is motion and the door opens.");
    EXPECT_EQ(s.main, "Turn on the hall light");
    EXPECT_EQ(to_string(split_conjuncts(s.conditional)), "('AND', ['there is motion', 'the door opens'])");
}

TEST(SplitConjuncts, Connectives) {
    EXPECT_EQ(to_string(split_conjuncts("the door opens or the window opens")),
              "('OR', ['the door opens', 'the window opens'])");
    EXPECT_EQ(to_string(split_conjuncts("a light turns on, the door opens and smoke is detected")),
              "('AND', ['a light turns on', 'the door opens', 'smoke is detected'])");
    EXPECT_EQ(to_string(split_conjuncts("the door opens")), "('NONE', ['the door opens'])");
    EXPECT_EQ(code_of([] { split_conjuncts("the door opens and smoke rises or water leaks"); }), "mixed-connectives");
}

TEST(ExtractPhrases, NounAndVerb) {
    const Phrases p = extract_phrases("the front door opens");
    EXPECT_EQ(p.noun_phrase, "the front door");
    EXPECT_EQ(p.verb_phrase, "opens");
    const Phrases q = extract_phrases("the speaker hears \"unlock the front door\"");
    ASSERT_TRUE(q.payload.has_value());
    EXPECT_EQ(*q.payload, "unlock the front door");
}

TEST(ExtractSemantics, HallLightTuple) {
    const SemanticTuple t = extract_semantics("Turn on the hall light if there is motion and the door opens.");
    EXPECT_EQ(to_string(t), "('AND', ['motion sensor', 'door contact sensor'], ['motion', 'open'], 'NONE', ['bulb'], ['on'])");
}

TEST(ExtractSemantics, SmokeAndWater) {
    const SemanticTuple smoke = extract_semantics("If smoke is detected, open the window.");
    EXPECT_EQ(smoke.trigger_roles, std::vector<std::string>{"smoke detector"});
    EXPECT_EQ(smoke.action_roles, std::vector<std::string>{"window opener"});
    EXPECT_EQ(smoke.action_verbs, std::vector<std::string>{"open"});
    const SemanticTuple leak = extract_semantics("If water is detected, close the valve.");
    EXPECT_EQ(leak.trigger_roles, std::vector<std::string>{"water leak sensor"});
    EXPECT_EQ(leak.action_verbs, std::vector<std::string>{"close"});
}

TEST(ExtractSemantics, VoiceTriggerKeepsPhrase) {
    const SemanticTuple t = extract_semantics("Preheat the oven when the speaker hears \"preheat the oven\".");
    ASSERT_EQ(t.trigger_actions.size(), 1u);
    EXPECT_EQ(t.trigger_roles, std::vector<std::string>{"speaker"});
    EXPECT_EQ(t.trigger_actions[0], "voice:preheat the oven");
    EXPECT_EQ(t.action_roles, std::vector<std::string>{"oven"});
}

TEST(ExtractSemantics, Rejections) {
    EXPECT_EQ(code_of([] { extract_semantics(""); }), "empty-description");
    EXPECT_EQ(code_of([] { extract_semantics("Turn on the light."); }), "no-trigger");
    EXPECT_EQ(code_of([] { extract_semantics("If motion is detected, turn on the light or open the window."); }),
              "or-action");
    EXPECT_EQ(code_of([] { extract_semantics("If the door does not open, turn on the light."); }), "negated-trigger");
    EXPECT_EQ(code_of([] { extract_semantics("If motion is detected, juggle the flamingo."); }), "no-phrase");
    EXPECT_EQ(code_of([] { extract_semantics("If motion is detected, open the toaster."); }), "unmatched-phrase");
}

TEST(BindApp, HallLightFixture) {
    const SystemConfig config = load_config(iota::test::fixture_config("hall_light"));
    const AppSpec& app = config.apps.at(0);
    const BoundAppRule r = bind_app(extract_semantics(app.description), app, config);
    EXPECT_EQ(r.app_name, "Light on when I come home");
    EXPECT_EQ(r.trigger_connective, Connective::And);
    ASSERT_EQ(r.triggers.size(), 2u);
    EXPECT_EQ(to_string(r.triggers[0].event), "reportsMotion(mijiaMotionSensor)");
    EXPECT_EQ(to_string(r.triggers[1].event), "open(ringContactSensor)");
    ASSERT_EQ(r.actions.size(), 1u);
    EXPECT_EQ(to_string(r.actions[0].command), "on(hueWifiBulb)");
}

TEST(BindApp, RoleErrors) {
    const SystemConfig config = parse_config(R"({
      "devices": [{"name": "Lamp", "type": "bulb"}, {"name": "Door Lock", "type": "lock"},
                  {"name": "Hall Motion", "type": "motion-sensor"}]})");
    const SemanticTuple t = extract_semantics("Turn on the light when motion is detected.");
    AppSpec wrong_type{"A", "", {{"motion sensor", "hallMotion"}, {"bulb", "doorLock"}}};
    EXPECT_EQ(code_of([&] { bind_app(t, wrong_type, config); }), "type-mismatch");
    AppSpec missing{"B", "", {{"motion sensor", "hallMotion"}}};
    EXPECT_EQ(code_of([&] { bind_app(t, missing, config); }), "missing-role");
    AppSpec dangling{"C", "", {{"motion sensor", "hallMotion"}, {"bulb", "kitchenLamp"}}};
    EXPECT_EQ(code_of([&] { bind_app(t, dangling, config); }), "unknown-device");
}

TEST(ProcessApps, EveryFixtureAppBinds) {
    for (const char* name : {"hall_light", "window_chain", "lock_routes", "voice_home"}) {
        const SystemConfig config = load_config(iota::test::fixture_config(name));
        const auto outcomes = process_apps(config);
        ASSERT_EQ(outcomes.size(), config.apps.size()) << name;
        for (const auto& o : outcomes) {
            EXPECT_TRUE(o.diagnostic_code.empty()) << name << ": " << o.app_name << ": " << o.diagnostic;
            EXPECT_TRUE(o.rule.has_value()) << name << ": " << o.app_name;
        }
    }
}

TEST(ProcessApps, FailuresBecomeDiagnostics) {
    const SystemConfig config = parse_config(R"({
      "devices": [{"name": "Lamp", "type": "bulb"}],
      "apps": [{"App name": "Broken", "description": "Make it nice.", "device map": {"bulb": "Lamp"}}]})");
    const auto outcomes = process_apps(config);
    ASSERT_EQ(outcomes.size(), 1u);
    EXPECT_EQ(outcomes[0].diagnostic_code, "no-trigger");
    EXPECT_FALSE(outcomes[0].rule.has_value());
}

TEST(Atoms, EventsAndCommands) {
    EXPECT_EQ(to_string(event_atom("motion", "m1")), "reportsMotion(m1)");
    EXPECT_EQ(to_string(event_atom("open", "c1")), "open(c1)");
    EXPECT_EQ(to_string(command_atom("on", "b1")), "on(b1)");
    EXPECT_EQ(to_string(command_atom("unlock", "l1")), "unlock(l1)");
    EXPECT_EQ(code_of([] { event_atom("levitation", "x"); }), "unknown-event");
    EXPECT_EQ(code_of([] { command_atom("teleport", "x"); }), "unknown-command");
}

TEST(Lexicon, BuiltinLoads) {
    const Lexicon& lex = Lexicon::builtin();
    EXPECT_FALSE(lex.roles.empty());
    EXPECT_TRUE(lex.determiners.count("the"));
    const std::string text = iota::test::read_file(iota::test::source_path("data/lexicon.json"));
    EXPECT_EQ(Lexicon::from_json(text).roles.size(), lex.roles.size());
}
