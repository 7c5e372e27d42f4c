#include "iota/system_model.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "iota/errors.hpp"
#include "iota/logic.hpp"

namespace iota {

using nlohmann::json;

namespace {

struct TypeInfo {
    DeviceType type;
    std::string_view lexicon;
    std::string_view predicate;
};

constexpr std::array<TypeInfo, kDeviceTypeCount> kTypes{{
    {DeviceType::Router, "router", "router"},
    {DeviceType::Gateway, "gateway", "gateway"},
    {DeviceType::Camera, "camera", "camera"},
    {DeviceType::Speaker, "speaker", "speaker"},
    {DeviceType::Bulb, "bulb", "bulb"},
    {DeviceType::Outlet, "outlet", "outlet"},
    // "lock" is also a command predicate, so the type predicate differs.
    {DeviceType::Lock, "lock", "doorLock"},
    {DeviceType::DoorOpener, "door-opener", "doorOpener"},
    {DeviceType::Oven, "oven", "oven"},
    {DeviceType::Heater, "heater", "heater"},
    {DeviceType::AC, "AC", "ac"},
    {DeviceType::Humidifier, "humidifier", "humidifier"},
    {DeviceType::WindowOpener, "window-opener", "windowOpener"},
    {DeviceType::Valve, "valve", "valve"},
    {DeviceType::Sprinkler, "sprinkler", "sprinkler"},
    {DeviceType::Stove, "stove", "stove"},
    {DeviceType::MotionSensor, "motion-sensor", "motionSensor"},
    {DeviceType::ContactSensor, "contact-sensor", "doorContactSensor"},
    {DeviceType::TemperatureSensor, "temperature-sensor", "temperatureSensor"},
    {DeviceType::HumiditySensor, "humidity-sensor", "humiditySensor"},
    {DeviceType::LightSensor, "light-sensor", "lightSensor"},
    {DeviceType::SmokeDetector, "smoke-detector", "smokeDetector"},
    {DeviceType::WaterLeakSensor, "water-leak-sensor", "waterLeakSensor"},
    {DeviceType::TV, "TV", "tv"},
    {DeviceType::Doorbell, "doorbell", "doorbell"},
    {DeviceType::Thermostat, "thermostat", "thermostat"},
}};

std::string fold(std::string_view text) {
    std::string out;
    for (char c : text)
        if (std::isalnum(static_cast<unsigned char>(c)))
            out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

[[noreturn]] void config_error(const std::string& message) { throw ConfigError(message); }

std::vector<std::string> string_list(const json& j, const char* what) {
    if (!j.is_array()) config_error(std::string(what) + " must be an array of strings");
    std::vector<std::string> out;
    for (const auto& item : j) {
        if (!item.is_string()) config_error(std::string(what) + " must be an array of strings");
        out.push_back(item.get<std::string>());
    }
    return out;
}

std::string required_string(const json& obj, std::initializer_list<const char*> keys, const char* what) {
    for (const char* key : keys) {
        auto it = obj.find(key);
        if (it != obj.end()) {
            if (!it->is_string()) config_error(std::string(what) + "." + key + " must be a string");
            return it->get<std::string>();
        }
    }
    config_error(std::string(what) + " is missing field '" + *keys.begin() + "'");
}

const json* optional_field(const json& obj, std::initializer_list<const char*> keys) {
    for (const char* key : keys) {
        auto it = obj.find(key);
        if (it != obj.end() && !it->is_null()) return &*it;
    }
    return nullptr;
}

std::optional<std::string> optional_ref(const json& obj, const char* key) {
    const json* j = optional_field(obj, {key});
    if (!j) return std::nullopt;
    if (!j->is_string()) config_error(std::string("device.") + key + " must be a string");
    return normalize_identifier(j->get<std::string>());
}

void validate(SystemConfig& config) {
    std::set<std::string> names;
    for (const auto& n : config.networks) {
        if (n.name.empty()) config_error("network with empty name");
        if (!names.insert(n.name).second) config_error("duplicate name '" + n.name + "'");
    }
    for (const auto& d : config.devices) {
        if (d.name.empty()) config_error("device with empty name");
        if (!names.insert(d.name).second)
            config_error("duplicate name '" + d.name + "' (from '" + d.display_name + "')");
    }
    for (const auto& d : config.devices) {
        for (const auto& n : d.networks)
            if (!config.find_network(n))
                config_error("dangling reference: device '" + d.name + "' names network '" + n + "'");
        auto check = [&](const std::optional<std::string>& ref, const char* field,
                         std::initializer_list<DeviceType> allowed) {
            if (!ref) return;
            const DeviceSpec* target = config.find_device(*ref);
            if (!target)
                config_error("dangling reference: device '" + d.name + "' " + field + " '" + *ref + "'");
            if (std::find(allowed.begin(), allowed.end(), target->type) == allowed.end())
                config_error("device '" + d.name + "' " + field + " '" + *ref + "' of incompatible type " +
                             std::string(to_string(target->type)));
        };
        check(d.plugs_into, "plugs_into", {DeviceType::Outlet});
        check(d.locked_by, "locked_by", {DeviceType::Lock});
        check(d.supplied_by, "supplied_by", {DeviceType::Valve});
    }
    for (const auto& app : config.apps)
        for (const auto& [role, device] : app.device_map)
            if (!config.find_device(device))
                config_error("dangling reference: app '" + app.app_name + "' maps '" + role + "' to '" +
                             device + "'");
    for (const auto& n : config.attacker.radio_adjacent)
        if (!config.find_network(n)) config_error("dangling reference: attacker radio_adjacent '" + n + "'");
    for (const auto& d : config.attacker.physical_access)
        if (!config.find_device(d)) config_error("dangling reference: attacker physical_access '" + d + "'");

    if (config.goals) {
        for (const auto& text : *config.goals) {
            Atom goal;
            try {
                goal = parse_atom(text);
            } catch (const ProgramError& e) {
                config_error(std::string("goal: ") + e.what());
            }
            std::vector<std::string> constants;
            for (const auto& arg : goal.args) {
                if (!arg.is_ground()) config_error("goal '" + text + "' is not ground");
                if (arg.kind == Term::Kind::Constant) constants.push_back(arg.name);
            }
            for (const auto& c : constants) {
                bool known = config.find_device(c) || config.find_network(c);
                for (Channel ch : all_channels()) known = known || to_string(ch) == c;
                if (!known) config_error("goal '" + text + "' references unknown name '" + c + "'");
            }
        }
    }
}

}  // namespace

std::string_view to_string(DeviceType type) { return kTypes[static_cast<std::size_t>(type)].lexicon; }

std::string_view type_predicate(DeviceType type) { return kTypes[static_cast<std::size_t>(type)].predicate; }

std::optional<DeviceType> parse_device_type(std::string_view text) {
    const std::string key = fold(text);
    for (const auto& info : kTypes)
        if (fold(info.lexicon) == key) return info.type;
    return std::nullopt;
}

const std::array<DeviceType, kDeviceTypeCount>& all_device_types() {
    static const std::array<DeviceType, kDeviceTypeCount> types = [] {
        std::array<DeviceType, kDeviceTypeCount> out{};
        for (std::size_t i = 0; i < kTypes.size(); ++i) out[i] = kTypes[i].type;
        return out;
    }();
    return types;
}

std::string_view to_string(Protocol protocol) {
    switch (protocol) {
        case Protocol::Wifi: return "wifi";
        case Protocol::Zigbee: return "zigbee";
        case Protocol::Zwave: return "zwave";
        case Protocol::Ble: return "ble";
        case Protocol::Ethernet: return "ethernet";
    }
    return "wifi";
}

std::optional<Protocol> parse_protocol(std::string_view text) {
    const std::string key = fold(text);
    for (Protocol p : {Protocol::Wifi, Protocol::Zigbee, Protocol::Zwave, Protocol::Ble, Protocol::Ethernet})
        if (key == to_string(p)) return p;
    if (key == "zwaveplus") return Protocol::Zwave;
    if (key == "bluetooth" || key == "bluetoothle") return Protocol::Ble;
    return std::nullopt;
}

bool is_low_power(Protocol protocol) {
    return protocol == Protocol::Zigbee || protocol == Protocol::Zwave || protocol == Protocol::Ble;
}

bool is_wireless(Protocol protocol) { return protocol != Protocol::Ethernet; }

std::string_view to_string(Channel channel) {
    switch (channel) {
        case Channel::Temperature: return "temperature";
        case Channel::Humidity: return "humidity";
        case Channel::Illuminance: return "illuminance";
        case Channel::Voice: return "voice";
        case Channel::Smoke: return "smoke";
        case Channel::Water: return "water";
    }
    return "temperature";
}

const std::array<Channel, 6>& all_channels() {
    static constexpr std::array<Channel, 6> channels{Channel::Temperature, Channel::Humidity,
                                                     Channel::Illuminance, Channel::Voice,
                                                     Channel::Smoke,       Channel::Water};
    return channels;
}

RoleFlags role_flags(DeviceType type) {
    RoleFlags f;
    using C = Channel;
    switch (type) {
        case DeviceType::Router:
        case DeviceType::Gateway:
            break;
        case DeviceType::Camera:
            f.sensor = true;
            f.actuator = true;
            f.voice_emitter = true;
            f.affects = {C::Voice};
            break;
        case DeviceType::Speaker:
            f.actuator = true;
            f.voice_emitter = true;
            f.voice_receiver = true;
            f.senses = {C::Voice};
            f.affects = {C::Voice};
            break;
        case DeviceType::TV:
            f.actuator = true;
            f.voice_emitter = true;
            f.affects = {C::Voice};
            break;
        case DeviceType::Doorbell:
            f.sensor = true;
            f.voice_emitter = true;
            f.affects = {C::Voice};
            break;
        case DeviceType::Bulb:
            f.actuator = true;
            f.affects = {C::Illuminance};
            break;
        case DeviceType::Heater:
            f.actuator = true;
            f.affects = {C::Temperature};
            break;
        case DeviceType::AC:
            f.actuator = true;
            f.affects = {C::Temperature};
            break;
        case DeviceType::Humidifier:
            f.actuator = true;
            f.affects = {C::Humidity};
            break;
        case DeviceType::Oven:
        case DeviceType::Stove:
            f.actuator = true;
            f.affects = {C::Smoke};
            break;
        case DeviceType::Sprinkler:
            f.actuator = true;
            f.affects = {C::Water};
            break;
        case DeviceType::Outlet:
        case DeviceType::Lock:
        case DeviceType::DoorOpener:
        case DeviceType::WindowOpener:
        case DeviceType::Valve:
            f.actuator = true;
            break;
        case DeviceType::Thermostat:
            f.sensor = true;
            f.actuator = true;
            f.senses = {C::Temperature};
            break;
        case DeviceType::MotionSensor:
        case DeviceType::ContactSensor:
            f.sensor = true;
            break;
        case DeviceType::TemperatureSensor:
            f.sensor = true;
            f.senses = {C::Temperature};
            break;
        case DeviceType::HumiditySensor:
            f.sensor = true;
            f.senses = {C::Humidity};
            break;
        case DeviceType::LightSensor:
            f.sensor = true;
            f.senses = {C::Illuminance};
            break;
        case DeviceType::SmokeDetector:
            f.sensor = true;
            f.senses = {C::Smoke};
            break;
        case DeviceType::WaterLeakSensor:
            f.sensor = true;
            f.senses = {C::Water};
            break;
    }
    return f;
}

std::string normalize_identifier(std::string_view text) {
    std::string out;
    bool word_start = true;
    for (char c : text) {
        const auto uc = static_cast<unsigned char>(c);
        if (!std::isalnum(uc)) {
            word_start = true;
            continue;
        }
        if (out.empty())
            out += static_cast<char>(std::tolower(uc));
        else if (word_start)
            out += static_cast<char>(std::toupper(uc));
        else
            out += c;
        word_start = false;
    }
    return out;
}

const DeviceSpec* SystemConfig::find_device(std::string_view name) const {
    for (const auto& d : devices)
        if (d.name == name) return &d;
    return nullptr;
}

const NetworkSpec* SystemConfig::find_network(std::string_view name) const {
    for (const auto& n : networks)
        if (n.name == name) return &n;
    return nullptr;
}

SystemConfig parse_config(std::string_view document) {
    json root;
    try {
        root = json::parse(document.begin(), document.end());
    } catch (const json::parse_error& e) {
        config_error(std::string("syntax error at byte ") + std::to_string(e.byte) + ": " + e.what());
    }
    if (!root.is_object()) config_error("configuration must be a JSON object");

    SystemConfig config;
    if (const json* nets = optional_field(root, {"networks"})) {
        if (!nets->is_array()) config_error("networks must be an array");
        for (const auto& n : *nets) {
            if (!n.is_object()) config_error("network entries must be objects");
            NetworkSpec spec;
            spec.name = normalize_identifier(required_string(n, {"name"}, "network"));
            const std::string type = required_string(n, {"type", "protocol"}, "network");
            auto protocol = parse_protocol(type);
            if (!protocol) config_error("unknown network type '" + type + "' for network '" + spec.name + "'");
            spec.protocol = *protocol;
            config.networks.push_back(std::move(spec));
        }
    }

    if (const json* devs = optional_field(root, {"devices"})) {
        if (!devs->is_array()) config_error("devices must be an array");
        for (const auto& d : *devs) {
            if (!d.is_object()) config_error("device entries must be objects");
            DeviceSpec spec;
            spec.display_name = required_string(d, {"name"}, "device");
            spec.name = normalize_identifier(spec.display_name);
            const std::string type = required_string(d, {"type"}, "device");
            auto parsed = parse_device_type(type);
            if (!parsed) config_error("unknown device_type '" + type + "' for device '" + spec.display_name + "'");
            spec.type = *parsed;
            spec.model = spec.display_name;
            if (const json* m = optional_field(d, {"model"})) {
                if (!m->is_string()) config_error("device.model must be a string");
                spec.model = m->get<std::string>();
            }
            if (const json* n = optional_field(d, {"network", "networks"}))
                for (const auto& name : string_list(*n, "device.network"))
                    spec.networks.push_back(normalize_identifier(name));
            if (const json* e = optional_field(d, {"exposed", "physically_exposed"})) {
                if (!e->is_boolean()) config_error("device.exposed must be a boolean");
                spec.physically_exposed = e->get<bool>();
            }
            spec.plugs_into = optional_ref(d, "plugs_into");
            spec.locked_by = optional_ref(d, "locked_by");
            spec.supplied_by = optional_ref(d, "supplied_by");
            config.devices.push_back(std::move(spec));
        }
    }

    if (const json* apps = optional_field(root, {"apps"})) {
        if (!apps->is_array()) config_error("apps must be an array");
        for (const auto& a : *apps) {
            if (!a.is_object()) config_error("app entries must be objects");
            AppSpec spec;
            spec.app_name = required_string(a, {"App name", "app_name", "name"}, "app");
            spec.description = required_string(a, {"description"}, "app");
            if (const json* m = optional_field(a, {"device map", "device_map"})) {
                if (!m->is_object()) config_error("app device map must be an object");
                for (const auto& [role, device] : m->items()) {
                    if (!device.is_string()) config_error("app device map values must be strings");
                    spec.device_map[role] = normalize_identifier(device.get<std::string>());
                }
            }
            config.apps.push_back(std::move(spec));
        }
    }

    const json* attacker = optional_field(root, {"attacker"});
    if (attacker && !attacker->is_object()) config_error("attacker must be an object");
    const json empty = json::object();
    const json& att = attacker ? *attacker : empty;
    if (const json* i = optional_field(att, {"internet", "has_internet"})) {
        if (!i->is_boolean()) config_error("attacker.internet must be a boolean");
        config.attacker.has_internet = i->get<bool>();
    }
    if (const json* r = optional_field(att, {"radio_adjacent"})) {
        for (const auto& n : string_list(*r, "attacker.radio_adjacent"))
            config.attacker.radio_adjacent.push_back(normalize_identifier(n));
    } else {
        for (const auto& n : config.networks)
            if (is_wireless(n.protocol)) config.attacker.radio_adjacent.push_back(n.name);
    }
    if (const json* p = optional_field(att, {"physical_access"})) {
        for (const auto& d : string_list(*p, "attacker.physical_access"))
            config.attacker.physical_access.push_back(normalize_identifier(d));
    } else {
        for (const auto& d : config.devices)
            if (d.physically_exposed) config.attacker.physical_access.push_back(d.name);
    }

    if (const json* g = optional_field(root, {"goals"})) config.goals = string_list(*g, "goals");

    validate(config);
    return config;
}

SystemConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const SystemConfig& config) {
    json root = json::object();
    json devices = json::array();
    for (const auto& d : config.devices) {
        json j = {{"name", d.display_name}, {"type", std::string(to_string(d.type))}, {"network", d.networks}};
        if (d.model != d.display_name) j["model"] = d.model;
        if (d.physically_exposed) j["exposed"] = true;
        if (d.plugs_into) j["plugs_into"] = *d.plugs_into;
        if (d.locked_by) j["locked_by"] = *d.locked_by;
        if (d.supplied_by) j["supplied_by"] = *d.supplied_by;
        devices.push_back(std::move(j));
    }
    root["devices"] = std::move(devices);
    json networks = json::array();
    for (const auto& n : config.networks)
        networks.push_back({{"name", n.name}, {"type", std::string(to_string(n.protocol))}});
    root["networks"] = std::move(networks);
    json apps = json::array();
    for (const auto& a : config.apps) {
        json map = json::object();
        for (const auto& [role, device] : a.device_map) map[role] = device;
        apps.push_back({{"App name", a.app_name}, {"description", a.description}, {"device map", map}});
    }
    root["apps"] = std::move(apps);
    root["attacker"] = {{"internet", config.attacker.has_internet},
                        {"radio_adjacent", config.attacker.radio_adjacent},
                        {"physical_access", config.attacker.physical_access}};
    if (config.goals) root["goals"] = *config.goals;
    return root.dump(2) + "\n";
}

}  // namespace iota
