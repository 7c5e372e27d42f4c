#include "iota/rule_compiler.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "iota/cve_store.hpp"
#include "iota/errors.hpp"

namespace iota {

namespace {

HornRule rule(Atom head, std::vector<Atom> body, std::string label) {
    return {std::move(head), std::move(body), std::move(label)};
}

Atom type_fact(DeviceType type, const std::string& device) {
    return {std::string(type_predicate(type)), {Term::constant(device)}};
}

Atom fact1(std::string pred, const std::string& a) { return {std::move(pred), {Term::constant(a)}}; }
Atom fact2(std::string pred, const std::string& a, const std::string& b) {
    return {std::move(pred), {Term::constant(a), Term::constant(b)}};
}

// Attacker guards that satisfy a precondition constant. Adjacency kinds also
// pin the network protocol so the scope comes from inNetwork.
std::vector<Atom> precondition_guards(PreconditionKind kind, Protocol protocol) {
    switch (kind) {
        case PreconditionKind::Network: return {atom("attackerRemoteReach", {"D"})};
        case PreconditionKind::AdjacentPhysically:
            return {atom("inNetwork", {"D", "N"}), atom(std::string(to_string(protocol)), {"N"}),
                    atom("attackerAdjacentPhysically", {"N"})};
        case PreconditionKind::AdjacentLogically:
            return {atom("inNetwork", {"D", "N"}), atom(std::string(to_string(protocol)), {"N"}),
                    atom("attackerAdjacentLogically", {"N"})};
        case PreconditionKind::Local: return {atom("attackerLocal", {"D"})};
        case PreconditionKind::Physical: return {atom("attackerPhysicalAccess", {"D"})};
    }
    return {atom("attackerRemoteReach", {"D"})};
}

struct EventAccessEntry {
    const char* predicate;
    DeviceType type;
    const char* channel;  // second argument, or nullptr
};

const std::vector<EventAccessEntry>& spoofable_events() {
    static const std::vector<EventAccessEntry> entries{
        {"reportsMotion", DeviceType::MotionSensor, nullptr},
        {"reportsMotion", DeviceType::Camera, nullptr},
        {"open", DeviceType::ContactSensor, nullptr},
        {"closed", DeviceType::ContactSensor, nullptr},
        {"reportsSmoke", DeviceType::SmokeDetector, nullptr},
        {"reportsWater", DeviceType::WaterLeakSensor, nullptr},
        {"reportsRing", DeviceType::Doorbell, nullptr},
        {"reportsHigh", DeviceType::TemperatureSensor, "temperature"},
        {"reportsLow", DeviceType::TemperatureSensor, "temperature"},
        {"reportsHigh", DeviceType::Thermostat, "temperature"},
        {"reportsLow", DeviceType::Thermostat, "temperature"},
        {"reportsHigh", DeviceType::HumiditySensor, "humidity"},
        {"reportsLow", DeviceType::HumiditySensor, "humidity"},
        {"reportsHigh", DeviceType::LightSensor, "illuminance"},
        {"reportsLow", DeviceType::LightSensor, "illuminance"},
    };
    return entries;
}

Atom type_guard(DeviceType type, const char* var) {
    return atom(std::string(type_predicate(type)), {var});
}

// "reportsHigh(S, temperature)" style head for an entry.
Atom event_head(const EventAccessEntry& e) {
    if (e.channel) return {e.predicate, {Term::variable("S"), Term::constant(e.channel)}};
    return atom(e.predicate, {"S"});
}

void add_predicates(std::map<std::string, std::size_t>& out, const Atom& a) { out.emplace(a.predicate, a.args.size()); }

void check_rules(const std::vector<HornRule>& rules) {
    for (const auto& r : rules)
        if (!is_range_restricted(r)) throw ProgramError("rule is not range-restricted: " + to_string(r));
}

template <typename T>
void append(std::vector<T>& dst, std::vector<T> src) {
    dst.insert(dst.end(), std::make_move_iterator(src.begin()), std::make_move_iterator(src.end()));
}

}  // namespace

// ---- facts -----------------------------------------------------------------

namespace {

std::vector<std::vector<Atom>> device_blocks(const SystemConfig& config) {
    std::vector<std::vector<Atom>> blocks;
    for (const auto& d : config.devices) {
        std::vector<Atom> block{type_fact(d.type, d.name)};
        for (const auto& n : d.networks) block.push_back(fact2("inNetwork", d.name, n));
        if (d.plugs_into) block.push_back(fact2("plugInto", d.name, *d.plugs_into));
        if (d.locked_by) block.push_back(fact2("lockedBy", d.name, *d.locked_by));
        if (d.supplied_by) block.push_back(fact2("suppliedBy", d.name, *d.supplied_by));
        if (d.type == DeviceType::DoorOpener && !d.locked_by) block.push_back(fact1("noLock", d.name));
        if (d.physically_exposed) block.push_back(fact1("physicallyExposed", d.name));
        blocks.push_back(std::move(block));
    }
    return blocks;
}

std::vector<Atom> network_facts(const SystemConfig& config) {
    std::vector<Atom> out;
    for (const auto& n : config.networks) out.push_back(fact1(std::string(to_string(n.protocol)), n.name));
    return out;
}

}  // namespace

std::vector<Atom> emit_config_facts(const SystemConfig& config) {
    std::vector<Atom> out;
    for (auto& block : device_blocks(config)) append(out, std::move(block));
    append(out, network_facts(config));
    return out;
}

std::vector<Atom> emit_attacker_facts(const SystemConfig& config) {
    std::vector<Atom> out;
    if (config.attacker.has_internet) out.push_back(atom("attackerOnInternet"));
    for (const auto& n : config.attacker.radio_adjacent) out.push_back(fact1("attackerRadioAdjacent", n));
    for (const auto& d : config.attacker.physical_access) out.push_back(fact1("attackerPhysicalAccess", d));
    return out;
}

std::string format_config_facts(const SystemConfig& config) {
    std::vector<std::vector<Atom>> blocks = device_blocks(config);
    if (auto nets = network_facts(config); !nets.empty()) blocks.push_back(std::move(nets));
    std::string out;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (i) out += '\n';
        for (const auto& a : blocks[i]) out += to_string(a) + ".\n";
    }
    return out;
}

// ---- rule libraries --------------------------------------------------------

std::vector<HornRule> emit_exploit_rules() {
    std::vector<HornRule> out;
    for (EffectKind effect : kEffectKinds) {
        const bool on_network = effect == EffectKind::WifiAccess;
        const Atom head = atom(std::string(effect_predicate(effect)), {on_network ? "W" : "D"});
        const Term effect_name = Term::constant(std::string(effect_functor(effect)));
        for (PreconditionKind pre : kPreconditionKinds) {
            const bool per_protocol =
                pre == PreconditionKind::AdjacentPhysically || pre == PreconditionKind::AdjacentLogically;
            std::vector<Protocol> protocols{Protocol::Wifi};
            if (per_protocol)
                protocols = {Protocol::Wifi, Protocol::Zigbee, Protocol::Zwave, Protocol::Ble, Protocol::Ethernet};
            for (Protocol p : protocols) {
                const std::string pre_name = precondition_functor(pre, p);
                std::vector<Atom> body{atom("vulExists", {"D", "V"}),
                                       Atom{"vulProperty", {Term::variable("V"), Term::constant(pre_name), effect_name}}};
                append(body, precondition_guards(pre, p));
                // Leaked credentials are for the wifi networks the device sits on.
                if (on_network) append(body, {atom("inNetwork", {"D", "W"}), atom("wifi", {"W"})});
                out.push_back(rule(head, std::move(body), "exploit " + pre_name + " -> " + std::string(effect_functor(effect))));
            }
        }
    }
    return out;
}

std::vector<HornRule> emit_propagation_rules() {
    std::vector<HornRule> out{
        rule(atom("attackerDeviceControl", {"D"}), {atom("attackerRoot", {"D"})}, "root grants device control"),
        rule(atom("attackerInNetwork", {"N"}), {atom("attackerRoot", {"D"}), atom("inNetwork", {"D", "N"})},
             "root device pivots into its network"),
        rule(atom("attackerLocal", {"D"}), {atom("attackerRoot", {"D"})}, "root grants local access"),
        rule(atom("attackerCommandInjection", {"D"}), {atom("attackerDeviceControl", {"D"})},
             "device control allows command injection"),
        rule(atom("attackerEventAccess", {"D"}), {atom("attackerDeviceControl", {"D"})},
             "device control allows event access"),
        rule(atom("attackerInNetwork", {"N"}), {atom("attackerWifiAccess", {"N"})}, "wifi credentials join network"),
        rule(atom("attackerAdjacentPhysically", {"N"}), {atom("attackerRadioAdjacent", {"N"})}, "radio range"),
        rule(atom("attackerAdjacentLogically", {"N"}), {atom("attackerInNetwork", {"N"})}, "network membership"),
        rule(atom("attackerAdjacentPhysically", {"N"}), {atom("attackerAdjacentLogically", {"N"})},
             "network member is in range"),
        rule(atom("attackerRemoteReach", {"D"}),
             {atom("attackerOnInternet"), atom("inNetwork", {"D", "N"}), atom("wifi", {"N"})}, "internet reach"),
        rule(atom("attackerRemoteReach", {"D"}),
             {atom("attackerOnInternet"), atom("inNetwork", {"D", "N"}), atom("ethernet", {"N"})}, "internet reach"),
        rule(atom("attackerRemoteReach", {"D"}), {atom("attackerInNetwork", {"N"}), atom("inNetwork", {"D", "N"})},
             "reach from inside network"),
        rule(atom("off", {"D"}), {atom("denialOfService", {"D"})}, "denial of service"),
    };

    for (DeviceType type : all_device_types())
        for (const auto& state : settable_states(type)) {
            std::vector<Atom> body{atom("attackerCommandInjection", {"D"}), type_guard(type, "D")};
            if (type == DeviceType::DoorOpener && state == "open") body.push_back(atom("openable", {"D"}));
            out.push_back(rule(atom(state, {"D"}), std::move(body), "injected command " + state));
        }

    for (const auto& e : spoofable_events())
        out.push_back(rule(event_head(e), {atom("attackerEventAccess", {"S"}), type_guard(e.type, "S")},
                           "spoofed event " + std::string(e.predicate)));
    out.push_back(rule(atom("speakerHears", {"S", "C"}),
                       {atom("attackerEventAccess", {"S"}), atom("speaker", {"S"}), atom("voiceCommandPhrase", {"C"})},
                       "spoofed voice command"));
    return out;
}

std::vector<HornRule> emit_dependency_rules() {
    auto channel = [](const char* level, const char* ch) { return Atom{level, {Term::constant(ch)}}; };
    auto report = [](const char* pred, const char* var, const char* ch) {
        return Atom{pred, {Term::variable(var), Term::constant(ch)}};
    };
    std::vector<HornRule> out{
        rule(atom("off", {"Device"}), {atom("plugInto", {"Device", "Outlet"}), atom("outlet", {"Outlet"}), atom("off", {"Outlet"})},
             "outlet powers device"),
        rule(atom("openable", {"D"}), {atom("noLock", {"D"})}, "opener without lock"),
        rule(atom("openable", {"D"}), {atom("lockedBy", {"D", "L"}), atom("unlock", {"L"})}, "lock released"),
        rule(atom("off", {"Device"}), {atom("suppliedBy", {"Device", "Valve"}), atom("valve", {"Valve"}), atom("close", {"Valve"})},
             "valve supplies device"),

        rule(channel("high", "temperature"), {atom("on", {"Heater"}), atom("heater", {"Heater"})}, "heater warms room"),
        rule(channel("low", "temperature"), {atom("on", {"AC"}), atom("ac", {"AC"})}, "AC cools room"),
        rule(channel("high", "humidity"), {atom("on", {"Humidifier"}), atom("humidifier", {"Humidifier"})},
             "humidifier raises humidity"),
        rule(channel("high", "illuminance"), {atom("on", {"Bulb"}), atom("bulb", {"Bulb"})}, "bulb lights room"),
        rule(channel("high", "smoke"), {atom("on", {"Oven"}), atom("oven", {"Oven"})}, "oven makes smoke"),
        rule(channel("high", "smoke"), {atom("on", {"Stove"}), atom("stove", {"Stove"})}, "stove makes smoke"),
        rule(channel("high", "water"), {atom("on", {"Sprinkler"}), atom("sprinkler", {"Sprinkler"})}, "sprinkler sprays water"),
    };
    for (DeviceType emitter : {DeviceType::Camera, DeviceType::TV, DeviceType::Speaker, DeviceType::Doorbell})
        out.push_back(rule(atom("voiceCommand", {"C"}),
                           {atom("attackerDeviceControl", {"E"}), type_guard(emitter, "E"), atom("voiceCommandPhrase", {"C"})},
                           std::string(type_predicate(emitter)) + " plays voice"));
    out.push_back(rule(channel("high", "voice"), {atom("voiceCommand", {"C"})}, "voice in room"));
    out.push_back(rule(atom("speakerHears", {"S", "C"}), {atom("voiceCommand", {"C"}), atom("speaker", {"S"})},
                       "speaker hears voice"));

    out.push_back(rule(report("reportsHigh", "TemperatureSensor", "temperature"),
                       {channel("high", "temperature"), atom("temperatureSensor", {"TemperatureSensor"})},
                       "sensor reports high temperature"));
    out.push_back(rule(report("reportsLow", "TemperatureSensor", "temperature"),
                       {channel("low", "temperature"), atom("temperatureSensor", {"TemperatureSensor"})},
                       "sensor reports low temperature"));
    out.push_back(rule(report("reportsHigh", "Thermostat", "temperature"),
                       {channel("high", "temperature"), atom("thermostat", {"Thermostat"})},
                       "thermostat reports high temperature"));
    out.push_back(rule(report("reportsLow", "Thermostat", "temperature"),
                       {channel("low", "temperature"), atom("thermostat", {"Thermostat"})},
                       "thermostat reports low temperature"));
    out.push_back(rule(report("reportsHigh", "HumiditySensor", "humidity"),
                       {channel("high", "humidity"), atom("humiditySensor", {"HumiditySensor"})},
                       "sensor reports high humidity"));
    out.push_back(rule(report("reportsHigh", "LightSensor", "illuminance"),
                       {channel("high", "illuminance"), atom("lightSensor", {"LightSensor"})},
                       "sensor reports high illuminance"));
    out.push_back(rule(atom("reportsSmoke", {"SmokeDetector"}),
                       {channel("high", "smoke"), atom("smokeDetector", {"SmokeDetector"})}, "detector reports smoke"));
    out.push_back(rule(atom("reportsWater", {"WaterLeakSensor"}),
                       {channel("high", "water"), atom("waterLeakSensor", {"WaterLeakSensor"})}, "sensor reports water"));
    return out;
}

std::vector<HornRule> emit_app_rules(const BoundAppRule& bound, const SystemConfig& config) {
    auto guard_for = [&](const std::string& device) {
        const DeviceSpec* d = config.find_device(device);
        if (!d) throw ProgramError("app '" + bound.app_name + "' references unknown device " + device);
        return *d;
    };
    std::vector<std::vector<std::pair<Atom, Atom>>> trigger_sets;
    if (bound.trigger_connective == Connective::Or) {
        for (const auto& t : bound.triggers) trigger_sets.push_back({{t.event, type_fact(guard_for(t.device).type, t.device)}});
    } else {
        std::vector<std::pair<Atom, Atom>> all;
        for (const auto& t : bound.triggers) all.emplace_back(t.event, type_fact(guard_for(t.device).type, t.device));
        trigger_sets.push_back(std::move(all));
    }

    std::vector<HornRule> out;
    for (const auto& action : bound.actions) {
        const DeviceSpec dev = guard_for(action.device);
        for (const auto& triggers : trigger_sets) {
            std::vector<Atom> body{type_fact(dev.type, dev.name)};
            if (dev.type == DeviceType::DoorOpener && action.command.predicate == "open")
                body.push_back(fact1("openable", dev.name));
            for (const auto& [event, guard] : triggers) {
                body.push_back(event);
                body.push_back(guard);
            }
            out.push_back(rule(action.command, std::move(body), bound.app_name));
        }
    }
    return out;
}

const std::vector<std::string>& settable_states(DeviceType type) {
    static const std::vector<std::string> none;
    static const std::vector<std::string> power{"on", "off"};
    static const std::vector<std::string> lock{"lock", "unlock"};
    static const std::vector<std::string> opener{"open", "close"};
    switch (type) {
        case DeviceType::Bulb:
        case DeviceType::Outlet:
        case DeviceType::Oven:
        case DeviceType::Heater:
        case DeviceType::AC:
        case DeviceType::Humidifier:
        case DeviceType::Sprinkler:
        case DeviceType::Stove:
        case DeviceType::TV:
        case DeviceType::Camera:
        case DeviceType::Speaker:
        case DeviceType::Thermostat:
            return power;
        case DeviceType::Lock:
            return lock;
        case DeviceType::DoorOpener:
        case DeviceType::WindowOpener:
        case DeviceType::Valve:
            return opener;
        default:
            return none;
    }
}

// ---- catalog and goals -----------------------------------------------------

const std::vector<PredicateInfo>& predicate_catalog() {
    static const std::vector<PredicateInfo> catalog = [] {
        std::map<std::string, std::size_t> preds;
        for (auto lib : {emit_exploit_rules, emit_propagation_rules, emit_dependency_rules})
            for (const auto& r : lib()) {
                add_predicates(preds, r.head);
                for (const auto& b : r.body) add_predicates(preds, b);
            }
        for (DeviceType t : all_device_types()) preds.emplace(std::string(type_predicate(t)), 1);
        for (Protocol p : {Protocol::Wifi, Protocol::Zigbee, Protocol::Zwave, Protocol::Ble, Protocol::Ethernet})
            preds.emplace(std::string(to_string(p)), 1);
        for (const char* p : {"physicallyExposed", "attackerPhysicalAccess", "attackerRadioAdjacent", "noLock"})
            preds.emplace(p, 1);
        std::vector<PredicateInfo> out;
        for (const auto& [name, arity] : preds) out.push_back({name, arity});
        return out;
    }();
    return catalog;
}

bool is_known_predicate(std::string_view name, std::size_t arity) {
    const auto& cat = predicate_catalog();
    return std::any_of(cat.begin(), cat.end(), [&](const PredicateInfo& p) { return p.name == name && p.arity == arity; });
}

std::vector<Atom> enumerate_goals(const SystemConfig& config) {
    std::vector<Atom> out;
    auto push = [&](Atom a) {
        if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(std::move(a));
    };
    if (config.goals) {
        for (const auto& text : *config.goals) {
            Atom a = parse_atom(text);
            if (!is_known_predicate(a.predicate, a.args.size()))
                throw ProgramError("goal uses unknown predicate " + a.predicate + "/" + std::to_string(a.args.size()));
            if (!a.is_ground()) throw ProgramError("goal is not ground: " + text);
            push(std::move(a));
        }
        return out;
    }
    for (const auto& d : config.devices) {
        for (const char* p : {"attackerRoot", "attackerDeviceControl", "attackerCommandInjection", "attackerEventAccess",
                              "denialOfService"})
            push(fact1(p, d.name));
        for (const auto& s : settable_states(d.type)) push(fact1(s, d.name));
    }
    for (const auto& n : config.networks) push(fact1("attackerInNetwork", n.name));
    for (Channel c : all_channels()) push(fact1("high", std::string(to_string(c))));
    push(fact1("low", "temperature"));
    return out;
}

// ---- program assembly ------------------------------------------------------

CompiledProgram compile_program(const SystemConfig& config, const std::vector<ScanResult>& scans,
                                const ExploitModels& models, std::vector<AppOutcome> apps) {
    CompiledProgram out;
    out.apps = std::move(apps);
    out.warnings = models.warnings;
    LogicProgram& prog = out.program;

    const std::vector<Atom> config_facts = emit_config_facts(config);
    const std::vector<Atom> attacker_facts = emit_attacker_facts(config);
    std::vector<Atom> vul_facts;
    for (const auto& s : scans) append(vul_facts, emit_vul_facts(s));
    std::vector<Atom> property_facts;
    {
        std::set<Atom> seen;
        for (const auto& m : models.models) {
            Atom f = vul_property_fact(m);
            if (seen.insert(f).second) property_facts.push_back(std::move(f));
        }
    }
    std::vector<Atom> voice_facts;
    std::vector<HornRule> app_rules;
    for (const auto& o : out.apps) {
        if (!o.rule) continue;
        for (const auto& t : o.rule->triggers)
            if (t.event.predicate == "speakerHears" && t.event.args.size() == 2) {
                Atom f{"voiceCommandPhrase", {t.event.args[1]}};
                if (std::find(voice_facts.begin(), voice_facts.end(), f) == voice_facts.end()) voice_facts.push_back(f);
            }
        append(app_rules, emit_app_rules(*o.rule, config));
    }

    for (const std::vector<Atom>* part : std::initializer_list<const std::vector<Atom>*>{&config_facts, &attacker_facts, &vul_facts, &property_facts, &voice_facts})
        prog.facts.insert(prog.facts.end(), part->begin(), part->end());
    append(prog.rules, emit_exploit_rules());
    append(prog.rules, emit_propagation_rules());
    append(prog.rules, emit_dependency_rules());
    append(prog.rules, std::move(app_rules));
    check_rules(prog.rules);
    for (const auto& r : prog.rules) {
        if (!is_known_predicate(r.head.predicate, r.head.args.size()))
            throw ProgramError("rule uses unknown predicate " + r.head.predicate);
        for (const auto& b : r.body)
            if (!is_known_predicate(b.predicate, b.args.size()))
                throw ProgramError("rule uses unknown predicate " + b.predicate);
    }

    out.goals = enumerate_goals(config);

    std::ostringstream text;
    text << "% configuration\n" << format_config_facts(config);
    auto section = [&](const char* title, const std::vector<Atom>& facts) {
        if (facts.empty()) return;
        text << "\n% " << title << '\n';
        for (const auto& f : facts) text << to_string(f) << ".\n";
    };
    section("attacker", attacker_facts);
    section("vulnerabilities", vul_facts);
    section("exploit models", property_facts);
    section("voice commands", voice_facts);
    text << "\n% rules\n";
    for (const auto& r : prog.rules) text << '\n' << to_string(r);
    out.text = text.str();
    return out;
}

}  // namespace iota
