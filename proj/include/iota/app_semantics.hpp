#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "iota/logic.hpp"
#include "iota/system_model.hpp"

namespace iota {

enum class Connective { And, Or, None };
std::string_view to_string(Connective c);

enum class LexiconSide { Trigger, Action };

struct LexiconRole {
    std::string role;
    LexiconSide side = LexiconSide::Trigger;
    std::vector<DeviceType> types;
    std::vector<std::string> keywords;
    // trigger roles: event name -> words that signal it
    std::vector<std::pair<std::string, std::vector<std::string>>> events;
    // action roles: supported command names
    std::vector<std::string> commands;
};

// Word lists and role tables driving the trigger-action extractor. The
// default instance is compiled from data/lexicon.json.
struct Lexicon {
    std::set<std::string, std::less<>> determiners;
    std::set<std::string, std::less<>> particles;
    std::set<std::string, std::less<>> copulas;
    std::set<std::string, std::less<>> verbs;
    std::set<std::string, std::less<>> adjectives;
    std::set<std::string, std::less<>> skip;
    std::set<std::string, std::less<>> negations;
    std::vector<std::pair<std::string, std::vector<std::string>>> commands;  // command -> phrases
    std::vector<LexiconRole> roles;

    static const Lexicon& builtin();
    static Lexicon from_json(std::string_view document);
    static Lexicon load(const std::string& path);
};

struct ClauseSplit {
    std::string conditional;
    std::string main;
};

struct ConjunctSplit {
    Connective connective = Connective::None;
    std::vector<std::string> sentences;
};

struct Phrases {
    std::string noun_phrase;
    std::string verb_phrase;
    std::optional<std::string> payload;  // quoted text, e.g. a voice command
};

struct LexiconMatch {
    std::string role;
    std::string predicate;  // event or command name ("motion", "on", "voice:preheat the oven")
};

struct SemanticTuple {
    Connective trigger_connective = Connective::None;
    std::vector<std::string> trigger_roles;
    std::vector<std::string> trigger_actions;
    Connective action_connective = Connective::None;
    std::vector<std::string> action_roles;
    std::vector<std::string> action_verbs;

    bool operator==(const SemanticTuple&) const = default;
};

// Python-tuple rendering: ('AND', ['motion sensor', ...], ['motion', ...], 'NONE', ['bulb'], ['on'])
std::string to_string(const SemanticTuple& tuple);
std::string to_string(const ConjunctSplit& split);

struct BoundTrigger {
    std::string device;
    Atom event;
};

struct BoundAction {
    std::string device;
    Atom command;
};

struct BoundAppRule {
    std::string app_name;
    Connective trigger_connective = Connective::None;
    std::vector<BoundTrigger> triggers;
    std::vector<BoundAction> actions;
};

ClauseSplit split_clauses(std::string_view description);
ConjunctSplit split_conjuncts(std::string_view clause);
Phrases extract_phrases(std::string_view simple_sentence, const Lexicon& lexicon = Lexicon::builtin());
LexiconMatch match_lexicon(const Phrases& phrases, LexiconSide side, const Lexicon& lexicon = Lexicon::builtin());

// Full extraction: clauses, conjuncts, phrases and lexicon matching.
SemanticTuple extract_semantics(std::string_view description, const Lexicon& lexicon = Lexicon::builtin());

BoundAppRule bind_app(const SemanticTuple& tuple, const AppSpec& app, const SystemConfig& config,
                      const Lexicon& lexicon = Lexicon::builtin());

// Atom for an event on a sensor ("motion" -> reportsMotion(s)).
Atom event_atom(std::string_view event, const std::string& device);
// Atom for a command on an actuator ("on" -> on(d)).
Atom command_atom(std::string_view command, const std::string& device);

struct AppOutcome {
    std::string app_name;
    std::optional<SemanticTuple> tuple;
    std::optional<BoundAppRule> rule;
    std::string diagnostic_code;  // empty on success
    std::string diagnostic;
};

// Extracts and binds every app; failures become diagnostics, not exceptions.
std::vector<AppOutcome> process_apps(const SystemConfig& config, const Lexicon& lexicon = Lexicon::builtin());

}  // namespace iota
