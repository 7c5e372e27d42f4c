#include "iota/exploit_model.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "iota/errors.hpp"

namespace iota {

namespace {

// Wording that means the exploit works from radio range without joining the
// network.
const std::vector<std::string> kPhysicalAdjacencyWords = {
    "sniff",       "sniffing",          "sniffed",           "eavesdrop",     "eavesdropping",
    "decrypt",     "decrypting",        "decrypted",         "capture traffic", "capturing traffic",
    "captured traffic", "replay",       "replayed",          "replaying",     "over the air",
    "intercept",   "intercepting",      "intercepted",       "radio range",   "unencrypted radio",
};

struct EffectKeywords {
    EffectKind kind;
    std::vector<std::string> phrases;
};

// Checked in this order; the first table with a hit decides.
const std::vector<EffectKeywords> kEffectKeywords = {
    {EffectKind::Root,
     {"root", "rooted", "root privileges", "arbitrary code", "arbitrary commands", "execute arbitrary",
      "code execution"}},
    {EffectKind::DeviceControl,
     {"take control", "full control", "take over", "control the device", "control of the device", "hijack"}},
    {EffectKind::CommandInjection,
     {"inject command", "inject commands", "command injection", "execute commands as", "send unauthorized commands",
      "issue commands"}},
    {EffectKind::WifiAccess,
     {"wifi password", "wifi passwords", "wifi credentials", "network credentials", "wifi passphrase", "wifi key"}},
    {EffectKind::EventAccess,
     {"spoof event", "spoof events", "spoofed events", "access the video", "access the audio", "video stream",
      "audio stream", "video feed", "camera feed", "sensor data"}},
    {EffectKind::Dos, {"denial of service", "crash", "crashes", "reboot loop", "reboot", "hang"}},
};

const std::vector<std::string> kMechanisms = {
    "buffer overflow", "integer overflow", "stack overflow", "heap overflow", "format string",
    "use after free",  "use-after-free",   "memory corruption", "out-of-bounds write", "out of bounds write",
};

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

bool contains_phrase(std::string_view text, std::string_view phrase) {
    std::size_t pos = 0;
    while ((pos = text.find(phrase, pos)) != std::string_view::npos) {
        const bool left = pos == 0 || !is_word_char(text[pos - 1]);
        const std::size_t end = pos + phrase.size();
        const bool right = end >= text.size() || !is_word_char(text[end]);
        if (left && right) return true;
        ++pos;
    }
    return false;
}

bool contains_any(std::string_view text, const std::vector<std::string>& phrases) {
    return std::any_of(phrases.begin(), phrases.end(), [&](const std::string& p) { return contains_phrase(text, p); });
}

PreconditionKind adjacent_branch(std::string_view normalized) {
    return contains_any(normalized, kPhysicalAdjacencyWords) ? PreconditionKind::AdjacentPhysically
                                                             : PreconditionKind::AdjacentLogically;
}

bool is_adjacency(PreconditionKind kind) {
    return kind == PreconditionKind::AdjacentPhysically || kind == PreconditionKind::AdjacentLogically;
}

struct EffectDecision {
    EffectKind kind;
    bool fallback = false;
};

EffectDecision decide_effect(const CveRecord& rec) {
    const std::string text = normalize_description(rec.description);
    for (const auto& table : kEffectKeywords)
        if (contains_any(text, table.phrases)) return {table.kind};
    static const std::regex obtain_events(R"(\bobtain(\s+\S+){0,3}\s+events?\b)");
    if (std::regex_search(text, obtain_events)) return {EffectKind::EventAccess};

    const bool mechanism = contains_any(text, kMechanisms);
    const bool c = rec.conf_impact == Impact::High;
    const bool i = rec.integ_impact == Impact::High;
    const bool a = rec.avail_impact == Impact::High;
    if (mechanism && a && !c && !i) return {EffectKind::Dos};
    if (mechanism && c && i && a) return {EffectKind::Root};
    if (!mechanism && c && !i && !a) return {EffectKind::EventAccess};
    if (!mechanism && i && !c && !a) return {EffectKind::CommandInjection};
    if (a) return {EffectKind::Dos};
    return {EffectKind::EventAccess, !c && !i};
}

}  // namespace

std::string_view to_string(PreconditionKind kind) {
    switch (kind) {
        case PreconditionKind::Network: return "network";
        case PreconditionKind::AdjacentPhysically: return "adjacentPhysically";
        case PreconditionKind::AdjacentLogically: return "adjacentLogically";
        case PreconditionKind::Local: return "local";
        case PreconditionKind::Physical: return "physical";
    }
    return "network";
}

std::string_view to_string(EffectKind kind) {
    switch (kind) {
        case EffectKind::Root: return "root";
        case EffectKind::DeviceControl: return "deviceControl";
        case EffectKind::CommandInjection: return "commandInjection";
        case EffectKind::EventAccess: return "eventAccess";
        case EffectKind::WifiAccess: return "wifiAccess";
        case EffectKind::Dos: return "dos";
    }
    return "root";
}

std::optional<PreconditionKind> parse_precondition_kind(std::string_view text) {
    for (auto k : kPreconditionKinds)
        if (to_string(k) == text) return k;
    return std::nullopt;
}

std::optional<EffectKind> parse_effect_kind(std::string_view text) {
    for (auto k : kEffectKinds)
        if (to_string(k) == text) return k;
    return std::nullopt;
}

std::string_view effect_functor(EffectKind kind) {
    switch (kind) {
        case EffectKind::Root: return "rootPrivilege";
        case EffectKind::DeviceControl: return "deviceControl";
        case EffectKind::CommandInjection: return "commandInjection";
        case EffectKind::EventAccess: return "eventAccess";
        case EffectKind::WifiAccess: return "wifiAccess";
        case EffectKind::Dos: return "dos";
    }
    return "rootPrivilege";
}

std::string_view effect_predicate(EffectKind kind) {
    switch (kind) {
        case EffectKind::Root: return "attackerRoot";
        case EffectKind::DeviceControl: return "attackerDeviceControl";
        case EffectKind::CommandInjection: return "attackerCommandInjection";
        case EffectKind::EventAccess: return "attackerEventAccess";
        case EffectKind::WifiAccess: return "attackerWifiAccess";
        case EffectKind::Dos: return "denialOfService";
    }
    return "attackerRoot";
}

std::string precondition_functor(PreconditionKind kind, Protocol protocol) {
    switch (kind) {
        case PreconditionKind::AdjacentPhysically: return std::string(to_string(protocol)) + "AdjacentPhysically";
        case PreconditionKind::AdjacentLogically: return std::string(to_string(protocol)) + "AdjacentLogically";
        default: return std::string(to_string(kind));
    }
}

std::string normalize_description(std::string_view description) {
    std::string out;
    out.reserve(description.size());
    bool space = false;
    for (char c : description) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            space = !out.empty();
            continue;
        }
        if (space) out += ' ';
        space = false;
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    std::size_t pos = 0;
    while ((pos = out.find("wi-fi", pos)) != std::string::npos) out.replace(pos, 5, "wifi");
    return out;
}

PreconditionKind classify_precondition(const CveRecord& rec, std::optional<Protocol> protocol) {
    switch (rec.attack_vector) {
        case AttackVector::Local: return PreconditionKind::Local;
        case AttackVector::Physical: return PreconditionKind::Physical;
        case AttackVector::Adjacent: return adjacent_branch(normalize_description(rec.description));
        case AttackVector::Network:
            if (protocol && is_low_power(*protocol)) return adjacent_branch(normalize_description(rec.description));
            return PreconditionKind::Network;
    }
    return PreconditionKind::Network;
}

EffectKind classify_effect(const CveRecord& rec) { return decide_effect(rec).kind; }

ExploitOverrides parse_overrides(std::string_view document) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(document.begin(), document.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("override file: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("override file must map cve ids to models");
    ExploitOverrides out;
    for (const auto& [id, entry] : root.items()) {
        if (!is_valid_cve_id(id)) throw ConfigError("override file: bad cve id '" + id + "'");
        auto pre = parse_precondition_kind(entry.value("precondition", ""));
        auto eff = parse_effect_kind(entry.value("effect", ""));
        if (!pre || !eff) throw ConfigError("override for '" + id + "' needs valid precondition and effect");
        out.emplace(id, ExploitOverride{*pre, *eff});
    }
    return out;
}

ExploitOverrides load_overrides(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read override file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_overrides(buf.str());
}

ExploitModels build_exploit_models(const ScanResult& scan, const CveStore& store, const SystemConfig& config,
                                   const ExploitOverrides& overrides) {
    ExploitModels out;
    const DeviceSpec* device = config.find_device(scan.device);
    if (!device) throw ConfigError("scan result for unknown device '" + scan.device + "'");

    for (const auto& cve : scan.cves) {
        const CveRecord* rec = store.find(cve);
        if (!rec) {
            out.warnings.push_back({cve, device->name, "record missing from store; skipped"});
            continue;
        }
        const auto pinned = overrides.find(cve);
        const bool has_override = pinned != overrides.end();

        EffectKind effect_kind;
        if (has_override) {
            effect_kind = pinned->second.effect;
        } else {
            const EffectDecision decision = decide_effect(*rec);
            effect_kind = decision.kind;
            if (decision.fallback)
                out.warnings.push_back({cve, device->name, "no effect indicator; fell back to eventAccess"});
        }

        std::vector<std::string> targets;
        if (effect_kind == EffectKind::WifiAccess) {
            for (const auto& n : device->networks)
                if (config.find_network(n)->protocol == Protocol::Wifi) targets.push_back(n);
            if (targets.empty()) {
                out.warnings.push_back({cve, device->name, "wifiAccess effect on a device off wifi; skipped"});
                continue;
            }
        } else {
            targets.push_back(device->name);
        }

        std::vector<Precondition> pres;
        auto add = [&](Precondition p) {
            if (std::find(pres.begin(), pres.end(), p) == pres.end()) pres.push_back(std::move(p));
        };
        auto make = [&](PreconditionKind kind, const NetworkSpec* net) {
            Precondition p{kind, std::nullopt, {}};
            if (is_adjacency(kind)) {
                p.protocol = net->protocol;
                p.scope = net->name;
            } else if (kind != PreconditionKind::Network) {
                p.scope = device->name;
            }
            return p;
        };

        if (device->networks.empty()) {
            PreconditionKind kind = has_override ? pinned->second.precondition : classify_precondition(*rec, std::nullopt);
            if (is_adjacency(kind)) {
                out.warnings.push_back({cve, device->name, "adjacency precondition on a device with no network; "
                                                           "downgraded to physical"});
                kind = PreconditionKind::Physical;
            }
            add(make(kind, nullptr));
        } else {
            for (const auto& n : device->networks) {
                const NetworkSpec* net = config.find_network(n);
                const PreconditionKind kind =
                    has_override ? pinned->second.precondition : classify_precondition(*rec, net->protocol);
                add(make(kind, net));
            }
        }

        for (const auto& pre : pres)
            for (const auto& target : targets)
                out.models.push_back(ExploitModel{cve, device->name, pre, Effect{effect_kind, target}});
    }
    return out;
}

ExploitModels build_all_exploit_models(const std::vector<ScanResult>& scans, const CveStore& store,
                                       const SystemConfig& config, const ExploitOverrides& overrides, int jobs) {
    std::vector<ExploitModels> parts(scans.size());
    std::vector<std::string> errors(scans.size());
    const long n = static_cast<long>(scans.size());
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, jobs))
    for (long i = 0; i < n; ++i) {
        try {
            parts[i] = build_exploit_models(scans[i], store, config, overrides);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    }
    ExploitModels out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (!errors[i].empty()) throw ConfigError(errors[i]);
        out.models.insert(out.models.end(), parts[i].models.begin(), parts[i].models.end());
        out.warnings.insert(out.warnings.end(), parts[i].warnings.begin(), parts[i].warnings.end());
    }
    return out;
}

Term precondition_term(const Precondition& pre) {
    return Term::constant(precondition_functor(pre.kind, pre.protocol.value_or(Protocol::Wifi)));
}

Term effect_term(const Effect& effect) { return Term::constant(std::string(effect_functor(effect.kind))); }

Atom vul_property_fact(const ExploitModel& model) {
    return Atom{"vulProperty", {Term::constant(model.cve_id), precondition_term(model.precondition),
                                effect_term(model.effect)}};
}

}  // namespace iota
