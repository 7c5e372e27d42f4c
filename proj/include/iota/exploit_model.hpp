#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "iota/cve_store.hpp"
#include "iota/logic.hpp"
#include "iota/system_model.hpp"

namespace iota {

enum class PreconditionKind { Network, AdjacentPhysically, AdjacentLogically, Local, Physical };
enum class EffectKind { Root, DeviceControl, CommandInjection, EventAccess, WifiAccess, Dos };

inline constexpr std::array<PreconditionKind, 5> kPreconditionKinds{
    PreconditionKind::Network, PreconditionKind::AdjacentPhysically, PreconditionKind::AdjacentLogically,
    PreconditionKind::Local, PreconditionKind::Physical};
inline constexpr std::array<EffectKind, 6> kEffectKinds{EffectKind::Root,        EffectKind::DeviceControl,
                                                        EffectKind::CommandInjection, EffectKind::EventAccess,
                                                        EffectKind::WifiAccess,  EffectKind::Dos};

std::string_view to_string(PreconditionKind kind);
std::string_view to_string(EffectKind kind);
std::optional<PreconditionKind> parse_precondition_kind(std::string_view text);
std::optional<EffectKind> parse_effect_kind(std::string_view text);

// Functor used for the effect term in vulProperty facts ("rootPrivilege").
std::string_view effect_functor(EffectKind kind);
// Head predicate an effect derives ("attackerRoot").
std::string_view effect_predicate(EffectKind kind);
// Functor for a precondition term; adjacency kinds are per protocol
// ("wifiAdjacentLogically"), the others ignore the protocol.
std::string precondition_functor(PreconditionKind kind, Protocol protocol);

struct Precondition {
    PreconditionKind kind = PreconditionKind::Network;
    std::optional<Protocol> protocol;  // adjacency kinds only
    std::string scope;                 // network for adjacency, device for local/physical, empty for network

    bool operator==(const Precondition&) const = default;
};

struct Effect {
    EffectKind kind = EffectKind::EventAccess;
    std::string target;  // device, or network for wifiAccess

    bool operator==(const Effect&) const = default;
};

struct ExploitModel {
    std::string cve_id;
    std::string device;
    Precondition precondition;
    Effect effect;

    bool operator==(const ExploitModel&) const = default;
};

// Hand-verified (precondition, effect) pins that win over classification.
struct ExploitOverride {
    PreconditionKind precondition;
    EffectKind effect;
};
using ExploitOverrides = std::map<std::string, ExploitOverride, std::less<>>;

ExploitOverrides parse_overrides(std::string_view document);
ExploitOverrides load_overrides(const std::string& path);

// Lowercases, folds "wi-fi" to "wifi" and collapses whitespace.
std::string normalize_description(std::string_view description);

PreconditionKind classify_precondition(const CveRecord& rec, std::optional<Protocol> protocol);
EffectKind classify_effect(const CveRecord& rec);

struct ModelingWarning {
    std::string cve_id;
    std::string device;
    std::string message;
};

struct ExploitModels {
    std::vector<ExploitModel> models;
    std::vector<ModelingWarning> warnings;
};

// One model per (device, cve), instantiated once per network for adjacency
// preconditions and once per target network for wifiAccess effects.
ExploitModels build_exploit_models(const ScanResult& scan, const CveStore& store, const SystemConfig& config,
                                   const ExploitOverrides& overrides = {});

// Same as calling build_exploit_models per scan; scans are classified in parallel.
ExploitModels build_all_exploit_models(const std::vector<ScanResult>& scans, const CveStore& store,
                                       const SystemConfig& config, const ExploitOverrides& overrides = {},
                                       int jobs = 1);

Term precondition_term(const Precondition& pre);
Term effect_term(const Effect& effect);
// vulProperty('CVE-...', <precondition>, <effect>)
Atom vul_property_fact(const ExploitModel& model);

}  // namespace iota
