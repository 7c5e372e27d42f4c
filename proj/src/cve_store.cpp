#include "iota/cve_store.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <regex>
#include <sstream>

#include <zlib.h>

#include <json.hpp>

#include "iota/errors.hpp"

namespace iota {

using nlohmann::json;

namespace {

const std::set<std::string, std::less<>> kStopWords = {
    "smart", "wifi", "wi", "fi", "device", "the", "a",
    // bare colour and size words
    "white", "black", "red", "green", "blue", "grey", "gray", "silver", "color", "colour",
    "mini", "small", "large", "big", "plus", "pro", "max",
};

std::optional<AttackVector> parse_av(const std::string& text) {
    if (text == "NETWORK") return AttackVector::Network;
    if (text == "ADJACENT_NETWORK" || text == "ADJACENT") return AttackVector::Adjacent;
    if (text == "LOCAL") return AttackVector::Local;
    if (text == "PHYSICAL") return AttackVector::Physical;
    return std::nullopt;
}

std::optional<Impact> parse_impact(const std::string& text) {
    if (text == "NONE") return Impact::None;
    if (text == "LOW" || text == "PARTIAL") return Impact::Low;
    if (text == "HIGH" || text == "COMPLETE") return Impact::High;
    return std::nullopt;
}

// Returns nullopt for items that cannot be stored.
std::optional<CveRecord> parse_item(const json& item) {
    if (!item.is_object()) return std::nullopt;
    CveRecord rec;
    try {
        const json& cve = item.at("cve");
        rec.cve_id = cve.at("CVE_data_meta").at("ID").get<std::string>();
        for (const auto& d : cve.at("description").at("description_data")) {
            if (d.value("lang", "") == "en") {
                rec.description = d.at("value").get<std::string>();
                break;
            }
        }
    } catch (const json::exception&) {
        return std::nullopt;
    }
    if (!is_valid_cve_id(rec.cve_id) || rec.description.empty()) return std::nullopt;
    rec.year = std::stoi(rec.cve_id.substr(4, 4));

    auto impact_it = item.find("impact");
    if (impact_it == item.end() || !impact_it->is_object()) return std::nullopt;
    const json& impact = *impact_it;
    try {
        if (impact.contains("baseMetricV3")) {
            const json& m = impact.at("baseMetricV3");
            const json& v3 = m.at("cvssV3");
            auto av = parse_av(v3.at("attackVector").get<std::string>());
            auto c = parse_impact(v3.at("confidentialityImpact").get<std::string>());
            auto i = parse_impact(v3.at("integrityImpact").get<std::string>());
            auto a = parse_impact(v3.at("availabilityImpact").get<std::string>());
            if (!av || !c || !i || !a) return std::nullopt;
            rec.attack_vector = *av;
            rec.conf_impact = *c;
            rec.integ_impact = *i;
            rec.avail_impact = *a;
            rec.impact_score = m.at("impactScore").get<double>();
            rec.exploitability_score = m.at("exploitabilityScore").get<double>();
        } else if (impact.contains("baseMetricV2")) {
            const json& m = impact.at("baseMetricV2");
            const json& v2 = m.at("cvssV2");
            // v2 has no physical vector; LOCAL stays local.
            auto av = parse_av(v2.at("accessVector").get<std::string>());
            auto c = parse_impact(v2.at("confidentialityImpact").get<std::string>());
            auto i = parse_impact(v2.at("integrityImpact").get<std::string>());
            auto a = parse_impact(v2.at("availabilityImpact").get<std::string>());
            if (!av || !c || !i || !a) return std::nullopt;
            rec.attack_vector = *av;
            rec.conf_impact = *c;
            rec.integ_impact = *i;
            rec.avail_impact = *a;
            rec.impact_score = m.at("impactScore").get<double>();
            rec.exploitability_score = m.at("exploitabilityScore").get<double>();
        } else {
            return std::nullopt;
        }
    } catch (const json::exception&) {
        return std::nullopt;
    }
    auto in_range = [](double s) { return s >= 0.0 && s <= 10.0; };
    if (!in_range(rec.impact_score) || !in_range(rec.exploitability_score)) return std::nullopt;
    return rec;
}

std::string read_maybe_gzip(const std::string& path) {
    if (!std::filesystem::is_regular_file(path)) throw StoreError("cannot read feed '" + path + "'");
    gzFile file = gzopen(path.c_str(), "rb");
    if (!file) throw StoreError("cannot open feed '" + path + "'");
    std::string out;
    char buf[1 << 16];
    int n = 0;
    while ((n = gzread(file, buf, sizeof buf)) > 0) out.append(buf, static_cast<std::size_t>(n));
    const bool failed = n < 0;
    gzclose(file);
    if (failed) throw StoreError("error decompressing feed '" + path + "'");
    return out;
}

json to_json(const CveRecord& r) {
    return {{"id", r.cve_id},
            {"description", r.description},
            {"attack_vector", std::string(to_string(r.attack_vector))},
            {"confidentiality", std::string(to_string(r.conf_impact))},
            {"integrity", std::string(to_string(r.integ_impact))},
            {"availability", std::string(to_string(r.avail_impact))},
            {"impact_score", r.impact_score},
            {"exploitability_score", r.exploitability_score},
            {"year", r.year}};
}

CveRecord from_json(const json& j) {
    CveRecord r;
    r.cve_id = j.at("id").get<std::string>();
    r.description = j.at("description").get<std::string>();
    const std::string av = j.at("attack_vector").get<std::string>();
    bool found = false;
    for (auto v : {AttackVector::Network, AttackVector::Adjacent, AttackVector::Local, AttackVector::Physical})
        if (to_string(v) == av) {
            r.attack_vector = v;
            found = true;
        }
    if (!found) throw StoreError("store: bad attack_vector '" + av + "'");
    auto impact = [](const std::string& s) {
        for (auto v : {Impact::None, Impact::Low, Impact::High})
            if (to_string(v) == s) return v;
        throw StoreError("store: bad impact '" + s + "'");
    };
    r.conf_impact = impact(j.at("confidentiality").get<std::string>());
    r.integ_impact = impact(j.at("integrity").get<std::string>());
    r.avail_impact = impact(j.at("availability").get<std::string>());
    r.impact_score = j.at("impact_score").get<double>();
    r.exploitability_score = j.at("exploitability_score").get<double>();
    r.year = j.at("year").get<int>();
    return r;
}

}  // namespace

std::string_view to_string(AttackVector av) {
    switch (av) {
        case AttackVector::Network: return "network";
        case AttackVector::Adjacent: return "adjacent";
        case AttackVector::Local: return "local";
        case AttackVector::Physical: return "physical";
    }
    return "network";
}

std::string_view to_string(Impact impact) {
    switch (impact) {
        case Impact::None: return "none";
        case Impact::Low: return "low";
        case Impact::High: return "high";
    }
    return "none";
}

bool is_valid_cve_id(std::string_view id) {
    static const std::regex pattern("CVE-(19|20)[0-9]{2}-[0-9]{4,}");
    return std::regex_match(id.begin(), id.end(), pattern);
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

std::vector<std::string> query_tokens(std::string_view device_full_name) {
    std::vector<std::string> out;
    for (auto& t : tokenize(device_full_name))
        if (!kStopWords.contains(t) && std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
    return out;
}

CveStore::CveStore(const CveStore& other) {
    std::shared_lock lock(other.mutex_);
    records_ = other.records_;
    by_id_ = other.by_id_;
    postings_ = other.postings_;
}

CveStore& CveStore::operator=(const CveStore& other) {
    if (this == &other) return *this;
    std::unique_lock mine(mutex_, std::defer_lock);
    std::shared_lock theirs(other.mutex_, std::defer_lock);
    std::lock(mine, theirs);
    records_ = other.records_;
    by_id_ = other.by_id_;
    postings_ = other.postings_;
    return *this;
}

void CveStore::index_record(std::size_t slot) {
    for (auto& t : tokenize(records_[slot].description)) postings_[t].insert(slot);
}

void CveStore::unindex_record(std::size_t slot) {
    for (auto& t : tokenize(records_[slot].description)) {
        auto it = postings_.find(t);
        if (it == postings_.end()) continue;
        it->second.erase(slot);
        if (it->second.empty()) postings_.erase(it);
    }
}

void CveStore::put(CveRecord record) {
    std::unique_lock lock(mutex_);
    auto it = by_id_.find(record.cve_id);
    if (it != by_id_.end()) {
        unindex_record(it->second);
        records_[it->second] = std::move(record);
        index_record(it->second);
        return;
    }
    const std::size_t slot = records_.size();
    by_id_.emplace(record.cve_id, slot);
    records_.push_back(std::move(record));
    index_record(slot);
}

IngestStats CveStore::ingest_feed(std::string_view feed_text) {
    json root;
    try {
        root = json::parse(feed_text.begin(), feed_text.end());
    } catch (const json::parse_error& e) {
        throw StoreError(std::string("unreadable feed: ") + e.what());
    }
    const json* items = nullptr;
    if (root.is_object() && root.contains("CVE_Items") && root["CVE_Items"].is_array())
        items = &root["CVE_Items"];
    else if (root.is_array())
        items = &root;
    if (!items) throw StoreError("unreadable feed: missing CVE_Items array");

    IngestStats stats;
    for (const auto& item : *items) {
        auto rec = parse_item(item);
        if (!rec) {
            ++stats.skipped;
            continue;
        }
        put(std::move(*rec));
        ++stats.stored;
    }
    return stats;
}

IngestStats CveStore::ingest_feed_file(const std::string& path) { return ingest_feed(read_maybe_gzip(path)); }

ScanResult CveStore::search_device(std::string_view device, std::string_view device_full_name) const {
    const auto tokens = query_tokens(device_full_name);
    if (tokens.empty())
        throw StoreError("device query '" + std::string(device_full_name) + "' has no tokens after stop-word removal");
    ScanResult result{std::string(device), {}};
    std::shared_lock lock(mutex_);
    std::vector<std::size_t> hits;
    bool first = true;
    for (const auto& t : tokens) {
        auto it = postings_.find(t);
        if (it == postings_.end()) return result;
        if (first) {
            hits.assign(it->second.begin(), it->second.end());
            first = false;
            continue;
        }
        std::vector<std::size_t> next;
        std::set_intersection(hits.begin(), hits.end(), it->second.begin(), it->second.end(),
                              std::back_inserter(next));
        hits = std::move(next);
    }
    for (auto slot : hits) result.cves.push_back(records_[slot].cve_id);
    std::sort(result.cves.begin(), result.cves.end());
    result.cves.erase(std::unique(result.cves.begin(), result.cves.end()), result.cves.end());
    return result;
}

const CveRecord* CveStore::find(std::string_view cve_id) const {
    std::shared_lock lock(mutex_);
    auto it = by_id_.find(cve_id);
    return it == by_id_.end() ? nullptr : &records_[it->second];
}

std::size_t CveStore::size() const {
    std::shared_lock lock(mutex_);
    return records_.size();
}

std::vector<CveRecord> CveStore::records() const {
    std::shared_lock lock(mutex_);
    std::vector<CveRecord> out = records_;
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.cve_id < b.cve_id; });
    return out;
}

CveStore CveStore::load(const std::string& path) {
    CveStore store;
    if (!std::filesystem::exists(path)) return store;
    std::ifstream in(path);
    if (!in) throw StoreError("cannot read store '" + path + "'");
    json root;
    try {
        root = json::parse(in);
        for (const auto& r : root.at("records")) store.put(from_json(r));
    } catch (const json::exception& e) {
        throw StoreError("corrupt store '" + path + "': " + e.what());
    }
    return store;
}

void CveStore::save(const std::string& path) const {
    json records = json::array();
    for (const auto& r : this->records()) records.push_back(to_json(r));
    const json root = {{"format", "iota-cve-store/1"}, {"records", std::move(records)}};
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw StoreError("cannot write store '" + path + "'");
        out << root.dump(1) << '\n';
        if (!out) throw StoreError("short write to store '" + path + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw StoreError("cannot replace store '" + path + "': " + ec.message());
}

std::vector<Atom> emit_vul_facts(const ScanResult& result) {
    std::vector<Atom> out;
    out.reserve(result.cves.size());
    for (const auto& cve : result.cves)
        out.push_back(Atom{"vulExists", {Term::constant(result.device), Term::constant(cve)}});
    return out;
}

}  // namespace iota
