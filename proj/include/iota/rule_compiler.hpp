#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "iota/app_semantics.hpp"
#include "iota/exploit_model.hpp"
#include "iota/logic.hpp"
#include "iota/system_model.hpp"

namespace iota {

// Configuration facts in emission order: per device (type, networks,
// dependencies, exposure), then network types.
std::vector<Atom> emit_config_facts(const SystemConfig& config);
std::vector<Atom> emit_attacker_facts(const SystemConfig& config);

// Device blocks separated by blank lines, one fact per line.
std::string format_config_facts(const SystemConfig& config);

// Config-independent rule libraries.
std::vector<HornRule> emit_exploit_rules();
std::vector<HornRule> emit_propagation_rules();
std::vector<HornRule> emit_dependency_rules();

std::vector<HornRule> emit_app_rules(const BoundAppRule& rule, const SystemConfig& config);

// States an attacker (or an app) can put an actuator of this type into.
const std::vector<std::string>& settable_states(DeviceType type);

struct PredicateInfo {
    std::string name;
    std::size_t arity = 0;
};
// Every predicate the compiled program may mention.
const std::vector<PredicateInfo>& predicate_catalog();
bool is_known_predicate(std::string_view name, std::size_t arity);

// Configured goals, or the full enumeration when none are given. Throws
// ProgramError for a goal outside the predicate catalog.
std::vector<Atom> enumerate_goals(const SystemConfig& config);

struct CompiledProgram {
    LogicProgram program;
    std::vector<Atom> goals;
    std::vector<AppOutcome> apps;
    std::vector<ModelingWarning> warnings;
    std::string text;  // human-readable clause file
};

// Assembles facts and rules; every rule is checked for range restriction.
CompiledProgram compile_program(const SystemConfig& config, const std::vector<ScanResult>& scans,
                                const ExploitModels& models, std::vector<AppOutcome> apps);

}  // namespace iota
