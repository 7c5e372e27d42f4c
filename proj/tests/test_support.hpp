#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "iota/cve_store.hpp"
#include "iota/system_model.hpp"

namespace iota::test {

inline std::string source_path(const std::string& rel) { return std::string(IOTA_SOURCE_DIR) + "/" + rel; }
inline std::string fixture_config(const std::string& name) { return source_path("fixtures/configs/" + name + ".json"); }
inline std::string fixture_feed() { return source_path("fixtures/feeds/mini_nvd.json"); }

inline const CveStore& fixture_store() {
    static const CveStore store = [] {
        CveStore s;
        s.ingest_feed_file(fixture_feed());
        return s;
    }();
    return store;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace iota::test
