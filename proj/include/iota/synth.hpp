#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "iota/system_model.hpp"

namespace iota {

inline constexpr std::size_t kSynthMinDevices = 1;
inline constexpr std::size_t kSynthMaxDevices = 500;

struct CatalogDevice {
    std::string model;
    DeviceType type;
    bool zigbee = false;  // joins zigbee1 instead of (or besides) wifi1
    bool wifi = true;
};

struct AppTemplate {
    std::string name;
    std::string description;
    // role phrase -> device type
    std::vector<std::pair<std::string, DeviceType>> roles;
};

const std::vector<CatalogDevice>& device_catalog();
const std::vector<AppTemplate>& app_catalog();

// Deterministic for a given (seed, count). About a third of the devices are
// never attached to an app. Throws ConfigError when count is outside
// [kSynthMinDevices, kSynthMaxDevices].
SystemConfig synthesize_system(std::uint64_t seed, std::size_t device_count);

}  // namespace iota
