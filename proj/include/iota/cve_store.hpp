#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "iota/logic.hpp"

namespace iota {

enum class AttackVector { Network, Adjacent, Local, Physical };
enum class Impact { None, Low, High };

std::string_view to_string(AttackVector av);
std::string_view to_string(Impact impact);

struct CveRecord {
    std::string cve_id;
    std::string description;
    AttackVector attack_vector = AttackVector::Network;
    Impact conf_impact = Impact::None;
    Impact integ_impact = Impact::None;
    Impact avail_impact = Impact::None;
    double impact_score = 0.0;
    double exploitability_score = 0.0;
    int year = 0;

    bool operator==(const CveRecord&) const = default;
};

struct ScanResult {
    std::string device;
    std::vector<std::string> cves;  // deduplicated, sorted

    bool operator==(const ScanResult&) const = default;
};

struct IngestStats {
    std::size_t stored = 0;
    std::size_t skipped = 0;
};

bool is_valid_cve_id(std::string_view id);

// Lowercased alphanumeric word tokens.
std::vector<std::string> tokenize(std::string_view text);
// Device-query tokens with stop words removed.
std::vector<std::string> query_tokens(std::string_view device_full_name);

// Local CVE store with an inverted token index over descriptions. Backed by a
// single JSON file; saves go through a temp file and rename.
class CveStore {
public:
    CveStore() = default;
    CveStore(const CveStore& other);
    CveStore& operator=(const CveStore& other);

    // Parses an NVD 1.1 style feed ({"CVE_Items": [...]}). Items without CVSS
    // metrics or with malformed fields are skipped and counted.
    IngestStats ingest_feed(std::string_view feed_text);
    // Reads a plain or gzip-compressed feed file. Throws StoreError if unreadable.
    IngestStats ingest_feed_file(const std::string& path);

    void put(CveRecord record);

    // All records whose description contains every query token as a whole word.
    ScanResult search_device(std::string_view device, std::string_view device_full_name) const;

    const CveRecord* find(std::string_view cve_id) const;
    std::size_t size() const;
    std::vector<CveRecord> records() const;

    static CveStore load(const std::string& path);
    void save(const std::string& path) const;

private:
    void index_record(std::size_t slot);
    void unindex_record(std::size_t slot);

    mutable std::shared_mutex mutex_;
    std::vector<CveRecord> records_;
    std::map<std::string, std::size_t, std::less<>> by_id_;
    std::map<std::string, std::set<std::size_t>, std::less<>> postings_;
};

// vulExists(device, 'CVE-...') per hit, in ScanResult order.
std::vector<Atom> emit_vul_facts(const ScanResult& result);

}  // namespace iota
