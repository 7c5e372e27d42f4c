#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace iota {

// Closed device-type lexicon. Unknown types are rejected at parse time.
enum class DeviceType {
    Router,
    Gateway,
    Camera,
    Speaker,
    Bulb,
    Outlet,
    Lock,
    DoorOpener,
    Oven,
    Heater,
    AC,
    Humidifier,
    WindowOpener,
    Valve,
    Sprinkler,
    Stove,
    MotionSensor,
    ContactSensor,
    TemperatureSensor,
    HumiditySensor,
    LightSensor,
    SmokeDetector,
    WaterLeakSensor,
    TV,
    Doorbell,
    Thermostat,
};

inline constexpr std::size_t kDeviceTypeCount = 26;

enum class Protocol { Wifi, Zigbee, Zwave, Ble, Ethernet };

enum class Channel { Temperature, Humidity, Illuminance, Voice, Smoke, Water };

struct RoleFlags {
    bool sensor = false;
    bool actuator = false;
    bool voice_emitter = false;
    bool voice_receiver = false;
    std::set<Channel> senses;
    std::set<Channel> affects;
};

// Lexicon spelling of a device type ("door-opener", "AC").
std::string_view to_string(DeviceType type);
// Predicate used in the logic program for a device type ("doorOpener").
std::string_view type_predicate(DeviceType type);
std::optional<DeviceType> parse_device_type(std::string_view text);
const std::array<DeviceType, kDeviceTypeCount>& all_device_types();

std::string_view to_string(Protocol protocol);
std::optional<Protocol> parse_protocol(std::string_view text);
bool is_low_power(Protocol protocol);
bool is_wireless(Protocol protocol);

std::string_view to_string(Channel channel);
const std::array<Channel, 6>& all_channels();

RoleFlags role_flags(DeviceType type);

// "D-Link Router" -> "dLinkRouter". Idempotent.
std::string normalize_identifier(std::string_view text);

struct DeviceSpec {
    std::string name;          // normalized atom
    std::string display_name;  // as written in the config
    std::string model;         // full name used for CVE search; defaults to display_name
    DeviceType type = DeviceType::Router;
    std::vector<std::string> networks;
    bool physically_exposed = false;
    std::optional<std::string> plugs_into;
    std::optional<std::string> locked_by;
    std::optional<std::string> supplied_by;

    bool operator==(const DeviceSpec&) const = default;
};

struct NetworkSpec {
    std::string name;
    Protocol protocol = Protocol::Wifi;
    bool low_power() const { return is_low_power(protocol); }

    bool operator==(const NetworkSpec&) const = default;
};

struct AppSpec {
    std::string app_name;
    std::string description;
    // abstract role phrase -> normalized device name
    std::map<std::string, std::string> device_map;

    bool operator==(const AppSpec&) const = default;
};

struct AttackerProfile {
    bool has_internet = true;
    std::vector<std::string> radio_adjacent;
    std::vector<std::string> physical_access;

    bool operator==(const AttackerProfile&) const = default;
};

struct SystemConfig {
    std::vector<DeviceSpec> devices;
    std::vector<NetworkSpec> networks;
    std::vector<AppSpec> apps;
    AttackerProfile attacker;
    std::optional<std::vector<std::string>> goals;  // goal atoms in clause syntax

    const DeviceSpec* find_device(std::string_view name) const;
    const NetworkSpec* find_network(std::string_view name) const;

    bool operator==(const SystemConfig&) const = default;
};

// Parses and validates a JSON configuration document. Throws ConfigError.
SystemConfig parse_config(std::string_view document);
SystemConfig load_config(const std::string& path);

// Canonical re-serialization; parse_config(serialize_config(c)) == c.
std::string serialize_config(const SystemConfig& config);

}  // namespace iota
