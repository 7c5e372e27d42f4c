#include "iota/synth.hpp"

#include <algorithm>
#include <map>
#include <random>

#include "iota/errors.hpp"

namespace iota {

namespace {

using T = DeviceType;

bool is_sensor(DeviceType t) {
    switch (t) {
        case T::MotionSensor:
        case T::ContactSensor:
        case T::TemperatureSensor:
        case T::HumiditySensor:
        case T::LightSensor:
        case T::SmokeDetector:
        case T::WaterLeakSensor:
        case T::Doorbell: return true;
        default: return false;
    }
}

class Picker {
public:
    explicit Picker(std::uint64_t seed) : rng_(seed) {}
    // Plain modulo keeps the sequence identical across standard libraries.
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }
    bool one_in(std::size_t n) { return below(n) == 0; }

private:
    std::mt19937_64 rng_;
};

}  // namespace

const std::vector<CatalogDevice>& device_catalog() {
    static const std::vector<CatalogDevice> catalog = {
        {"D-Link Router", T::Router},
        {"Netgear Router", T::Router},
        {"Smartthings Hub", T::Gateway, true},
        {"Hue Bridge", T::Gateway, true},
        {"Xiaomi Gateway", T::Gateway, true},
        {"August Bridge", T::Gateway},
        {"Nest Cam IQ Indoor", T::Camera},
        {"D-Link DCS Camera", T::Camera},
        {"Arlo Basestation", T::Camera},
        {"Sonos Speaker", T::Speaker},
        {"Amazon Echo", T::Speaker},
        {"Roku TV", T::TV},
        {"Ring Doorbell", T::Doorbell},
        {"Hue Wifi Bulb", T::Bulb, true, false},
        {"Sengled Bulb", T::Bulb, true, false},
        {"Wemo Outlet", T::Outlet},
        {"Yale Lock", T::Lock, true, false},
        {"August Smart Lock", T::Lock, true, false},
        {"Chamberlain Door Opener", T::DoorOpener},
        {"GE Oven", T::Oven},
        {"Bosch Stove", T::Stove},
        {"Dyson Heater", T::Heater},
        {"Frigidaire AC", T::AC},
        {"Levoit Humidifier", T::Humidifier},
        {"Ryse Window Opener", T::WindowOpener, true, false},
        {"Moen Valve", T::Valve, true, false},
        {"Rachio Sprinkler", T::Sprinkler},
        {"Xiaomi Motion Sensor", T::MotionSensor, true, false},
        {"Mijia Motion Sensor", T::MotionSensor, true, false},
        {"Ring Contact Sensor", T::ContactSensor, true, false},
        {"Aqara Temperature Sensor", T::TemperatureSensor, true, false},
        {"Aqara Humidity Sensor", T::HumiditySensor, true, false},
        {"Hue Light Sensor", T::LightSensor, true, false},
        {"Nest Protect", T::SmokeDetector},
        {"Fibaro Water Sensor", T::WaterLeakSensor, true, false},
        {"Ecobee Thermostat", T::Thermostat},
    };
    return catalog;
}

const std::vector<AppTemplate>& app_catalog() {
    static const std::vector<AppTemplate> apps = {
        {"Motion light", "Turn on the light when motion is detected.",
         {{"motion sensor", T::MotionSensor}, {"bulb", T::Bulb}}},
        {"Hall light", "Turn on the hall light if there is motion and the door opens.",
         {{"motion sensor", T::MotionSensor}, {"contact sensor", T::ContactSensor}, {"bulb", T::Bulb}}},
        {"Smoke vent", "If smoke is detected, open the window.",
         {{"smoke detector", T::SmokeDetector}, {"window opener", T::WindowOpener}}},
        {"Smoke escape", "If smoke is detected, unlock the door.",
         {{"smoke detector", T::SmokeDetector}, {"lock", T::Lock}}},
        {"Preheat oven", "Preheat the oven when the speaker hears \"preheat the oven\".",
         {{"speaker", T::Speaker}, {"oven", T::Oven}}},
        {"Dry air", "Turn on the humidifier when the humidity drops.",
         {{"humidity sensor", T::HumiditySensor}, {"humidifier", T::Humidifier}}},
        {"Warm up", "Turn on the heater when the temperature drops.",
         {{"temperature sensor", T::TemperatureSensor}, {"heater", T::Heater}}},
        {"Cool down", "Turn on the AC when the temperature rises.",
         {{"temperature sensor", T::TemperatureSensor}, {"AC", T::AC}}},
        {"Leak shutoff", "If water is detected, close the valve.",
         {{"water leak sensor", T::WaterLeakSensor}, {"valve", T::Valve}}},
        {"Voice unlock", "Unlock the door when the speaker hears \"unlock the door\".",
         {{"speaker", T::Speaker}, {"lock", T::Lock}}},
        {"Doorbell light", "Turn on the light when the doorbell rings.",
         {{"doorbell", T::Doorbell}, {"bulb", T::Bulb}}},
        {"Smoke power cut", "Turn off the outlet when smoke is detected.",
         {{"smoke detector", T::SmokeDetector}, {"outlet", T::Outlet}}},
        {"Hot room", "Open the window when the temperature rises.",
         {{"temperature sensor", T::TemperatureSensor}, {"window opener", T::WindowOpener}}},
        {"Fire sprinkler", "Turn on the sprinkler when smoke is detected.",
         {{"smoke detector", T::SmokeDetector}, {"sprinkler", T::Sprinkler}}},
        {"Voice light", "Turn on the light when the speaker hears \"turn on the light\".",
         {{"speaker", T::Speaker}, {"bulb", T::Bulb}}},
        {"Stove guard", "Turn off the stove if smoke is detected.",
         {{"smoke detector", T::SmokeDetector}, {"stove", T::Stove}}},
        {"Dark room", "Turn on the light when the light level drops.",
         {{"light sensor", T::LightSensor}, {"bulb", T::Bulb}}},
        {"Garage voice", "Open the garage door when the speaker hears \"open the garage\".",
         {{"speaker", T::Speaker}, {"door opener", T::DoorOpener}}},
    };
    return apps;
}

SystemConfig synthesize_system(std::uint64_t seed, std::size_t device_count) {
    if (device_count < kSynthMinDevices || device_count > kSynthMaxDevices)
        throw ConfigError("synthetic device count must be in [" + std::to_string(kSynthMinDevices) + ", " +
                          std::to_string(kSynthMaxDevices) + "], got " + std::to_string(device_count));
    Picker pick(seed);
    const auto& catalog = device_catalog();

    std::vector<const CatalogDevice*> chosen;
    std::vector<const CatalogDevice*> routers;
    for (const auto& c : catalog)
        if (c.type == T::Router) routers.push_back(&c);
    chosen.push_back(routers[pick.below(routers.size())]);
    while (chosen.size() < device_count) chosen.push_back(&catalog[pick.below(catalog.size())]);

    SystemConfig config;
    std::map<std::string, int> seen;
    bool zigbee = false;
    for (const auto* c : chosen) {
        DeviceSpec d;
        const int k = ++seen[c->model];
        d.display_name = k == 1 ? c->model : c->model + " " + std::to_string(k);
        d.name = normalize_identifier(d.display_name);
        d.model = c->model;
        d.type = c->type;
        if (c->wifi) d.networks.push_back("wifi1");
        if (c->zigbee) {
            d.networks.push_back("zigbee1");
            zigbee = true;
        }
        d.physically_exposed = is_sensor(c->type) && pick.one_in(5);
        config.devices.push_back(std::move(d));
    }
    config.networks.push_back({"wifi1", Protocol::Wifi});
    if (zigbee) config.networks.push_back({"zigbee1", Protocol::Zigbee});

    auto of_type = [&](DeviceType t, const std::vector<bool>* allowed) {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < config.devices.size(); ++i)
            if (config.devices[i].type == t && (!allowed || (*allowed)[i])) out.push_back(i);
        return out;
    };
    for (auto& d : config.devices) {
        if (d.type == T::Bulb && pick.one_in(4)) {
            auto outlets = of_type(T::Outlet, nullptr);
            if (!outlets.empty()) d.plugs_into = config.devices[outlets[pick.below(outlets.size())]].name;
        } else if (d.type == T::DoorOpener) {
            auto locks = of_type(T::Lock, nullptr);
            if (!locks.empty()) d.locked_by = config.devices[locks[pick.below(locks.size())]].name;
        } else if (d.type == T::Sprinkler && pick.one_in(2)) {
            auto valves = of_type(T::Valve, nullptr);
            if (!valves.empty()) d.supplied_by = config.devices[valves[pick.below(valves.size())]].name;
        }
    }

    // A third of the devices (rounded up) never appear in a device map.
    std::vector<std::size_t> order(device_count);
    for (std::size_t i = 0; i < device_count; ++i) order[i] = i;
    for (std::size_t i = device_count; i > 1; --i) std::swap(order[i - 1], order[pick.below(i)]);
    std::vector<bool> attachable(device_count, true);
    for (std::size_t i = 0; i < (device_count + 2) / 3; ++i) attachable[order[i]] = false;

    const auto& templates = app_catalog();
    const std::size_t attempts = device_count / 2 + 1;
    for (std::size_t a = 0; a < attempts; ++a) {
        const AppTemplate& t = templates[pick.below(templates.size())];
        AppSpec app;
        bool ok = true;
        for (const auto& [role, type] : t.roles) {
            auto candidates = of_type(type, &attachable);
            if (candidates.empty()) {
                ok = false;
                break;
            }
            app.device_map[role] = config.devices[candidates[pick.below(candidates.size())]].name;
        }
        if (!ok) continue;
        app.app_name = t.name + " " + std::to_string(config.apps.size() + 1);
        app.description = t.description;
        config.apps.push_back(std::move(app));
    }

    config.attacker.has_internet = true;
    for (const auto& d : config.devices)
        if (d.physically_exposed) config.attacker.physical_access.push_back(d.name);

    // Round trip so the result is exactly what a reader of the file sees.
    return parse_config(serialize_config(config));
}

}  // namespace iota
