#include "sbomvert/tracker.hpp"

#include "sbomvert/error.hpp"
#include "sbomvert/version.hpp"

#include <nlohmann/json.hpp>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cctype>
#include <regex>
#include <sstream>

namespace sbomvert::tracker {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::ranges::transform(out, out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::MalformedTrackerData, what); }

Status debian_status(std::string_view status, const std::optional<std::string>& fixed,
                     const std::optional<std::string>& urgency) {
    if (fixed && *fixed == "0") return Status::NotAffected;
    if (urgency && *urgency == "unimportant") return Status::Unimportant;
    if (status == "resolved") return fixed ? Status::Resolved : Status::NotAffected;
    // "open" and "undetermined"
    return Status::Open;
}

struct SecfixesPackage {
    std::string name;
    std::vector<std::pair<std::string, std::vector<std::string>>> fixes;
};

struct Secdb {
    std::optional<std::string> distroversion;
    std::vector<SecfixesPackage> packages;
};

Secdb read_secdb_json(std::string_view text) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        malformed(e.what());
    }
    if (!root.is_object()) malformed("secdb root must be an object");
    Secdb db;
    if (auto it = root.find("distroversion"); it != root.end() && it->is_string()) db.distroversion = it->get<std::string>();
    const auto pkgs = root.find("packages");
    if (pkgs == root.end() || pkgs->is_null()) return db;
    if (!pkgs->is_array()) malformed("secdb 'packages' must be an array");
    for (const auto& item : *pkgs) {
        const auto& pkg = item.contains("pkg") ? item["pkg"] : item;
        if (!pkg.is_object() || !pkg.contains("name") || !pkg["name"].is_string()) malformed("secdb package without name");
        SecfixesPackage sp{pkg["name"].get<std::string>(), {}};
        if (auto sf = pkg.find("secfixes"); sf != pkg.end() && !sf->is_null()) {
            if (!sf->is_object()) malformed("secfixes of '" + sp.name + "' must be a map");
            for (auto fix = sf->begin(); fix != sf->end(); ++fix) {
                std::vector<std::string> ids;
                if (fix->is_array()) {
                    for (const auto& id : *fix) {
                        if (!id.is_string()) malformed("secfixes of '" + sp.name + "' holds a non-string id");
                        ids.push_back(id.get<std::string>());
                    }
                } else if (!fix->is_null()) {
                    malformed("secfixes entry of '" + sp.name + "' must be a list");
                }
                sp.fixes.emplace_back(fix.key(), std::move(ids));
            }
        }
        db.packages.push_back(std::move(sp));
    }
    return db;
}

Secdb read_secdb_yaml(std::string_view text) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(text));
    } catch (const YAML::Exception& e) {
        malformed(e.what());
    }
    Secdb db;
    if (!root || root.IsNull()) return db;
    if (!root.IsMap()) malformed("secdb root must be a map");
    try {
        if (root["distroversion"]) db.distroversion = root["distroversion"].as<std::string>();
        const auto pkgs = root["packages"];
        if (!pkgs || pkgs.IsNull()) return db;
        if (!pkgs.IsSequence()) malformed("secdb 'packages' must be a list");
        for (const auto& item : pkgs) {
            const auto pkg = item["pkg"] ? item["pkg"] : item;
            if (!pkg.IsMap() || !pkg["name"]) malformed("secdb package without name");
            SecfixesPackage sp{pkg["name"].as<std::string>(), {}};
            const auto sf = pkg["secfixes"];
            if (sf && !sf.IsNull()) {
                if (!sf.IsMap()) malformed("secfixes of '" + sp.name + "' must be a map");
                for (const auto& fix : sf) {
                    std::vector<std::string> ids;
                    if (fix.second.IsSequence()) {
                        for (const auto& id : fix.second) ids.push_back(id.as<std::string>());
                    } else if (!fix.second.IsNull()) {
                        malformed("secfixes entry of '" + sp.name + "' must be a list");
                    }
                    sp.fixes.emplace_back(fix.first.as<std::string>(), std::move(ids));
                }
            }
            db.packages.push_back(std::move(sp));
        }
    } catch (const YAML::Exception& e) {
        malformed(e.what());
    }
    return db;
}

} // namespace

std::string_view to_string(Status s) noexcept {
    switch (s) {
    case Status::Open: return "open";
    case Status::Resolved: return "resolved";
    case Status::Unimportant: return "unimportant";
    case Status::NotAffected: return "not_affected";
    }
    return "open";
}

bool is_cve_id(std::string_view id) {
    static const std::regex kCve(R"(^CVE-\d{4}-\d{4,}$)");
    return std::regex_match(id.begin(), id.end(), kCve);
}

int CveEntry::year() const { return is_cve_id(id) ? std::stoi(id.substr(4, 4)) : 0; }

void CveDatabase::add(Ecosystem os, std::string_view release, std::string_view source, CveEntry entry) {
    entries_[Key{os, std::string(release), lower(source)}].push_back(std::move(entry));
    ++count_;
}

void CveDatabase::merge(const CveDatabase& other) {
    for (const auto& [key, list] : other.entries_) {
        auto& dst = entries_[key];
        dst.insert(dst.end(), list.begin(), list.end());
        count_ += list.size();
    }
    snapshots.insert(snapshots.end(), other.snapshots.begin(), other.snapshots.end());
}

const std::vector<CveEntry>* CveDatabase::find(Ecosystem os, std::string_view release, std::string_view source) const {
    const auto it = entries_.find(Key{os, std::string(release), lower(source)});
    return it == entries_.end() ? nullptr : &it->second;
}

CveDatabase load_debian_tracker(std::string_view json_text) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        malformed(e.what());
    }
    if (!root.is_object()) malformed("tracker root must be an object keyed by source package");

    CveDatabase db;
    db.snapshots.push_back("debian-security-tracker");
    for (auto src = root.begin(); src != root.end(); ++src) {
        if (!src->is_object()) malformed("source '" + src.key() + "' must map CVE ids to objects");
        for (auto cve = src->begin(); cve != src->end(); ++cve) {
            if (!is_cve_id(cve.key())) continue;
            if (!cve->is_object()) malformed(src.key() + "/" + cve.key() + " must be an object");
            const auto releases = cve->find("releases");
            if (releases == cve->end()) continue;
            if (!releases->is_object()) malformed(src.key() + "/" + cve.key() + ": 'releases' must be an object");
            for (auto rel = releases->begin(); rel != releases->end(); ++rel) {
                const auto where = src.key() + "/" + cve.key() + "/" + rel.key();
                if (!rel->is_object()) malformed(where + " must be an object");
                auto str = [&](const char* key) -> std::optional<std::string> {
                    const auto it = rel->find(key);
                    if (it == rel->end() || it->is_null()) return std::nullopt;
                    if (!it->is_string()) malformed(where + ": '" + key + "' must be a string");
                    return it->get<std::string>();
                };
                const auto status = str("status");
                if (!status) malformed(where + ": missing status");
                CveEntry e;
                e.id = cve.key();
                e.fixed_version = str("fixed_version");
                e.urgency = str("urgency");
                e.status = debian_status(*status, e.fixed_version, e.urgency);
                db.add(Ecosystem::Debian, rel.key(), src.key(), std::move(e));
            }
        }
    }
    return db;
}

CveDatabase load_alpine_secdb(std::string_view text, std::optional<std::string> release) {
    const auto first = std::ranges::find_if(text, [](unsigned char c) { return !std::isspace(c); });
    const auto secdb = first != text.end() && *first == '{' ? read_secdb_json(text) : read_secdb_yaml(text);

    std::string branch;
    if (release) {
        branch = *release;
    } else if (secdb.distroversion) {
        branch = *secdb.distroversion;
    } else if (!secdb.packages.empty()) {
        malformed("secdb has no distroversion and no release was given");
    }
    if (branch.starts_with("v")) branch.erase(0, 1);

    CveDatabase db;
    db.snapshots.push_back("alpine-secdb " + (branch.empty() ? std::string("?") : branch));
    for (const auto& pkg : secdb.packages) {
        for (const auto& [fixed, ids] : pkg.fixes) {
            for (const auto& field : ids) {
                // Values like "CVE-2018-7540 XSA-252" name several advisories.
                std::istringstream words(field);
                for (std::string id; words >> id;) {
                    if (!is_cve_id(id)) continue;
                    CveEntry e;
                    e.id = id;
                    // "0" lists CVEs that never affected the Alpine package.
                    if (fixed == "0") {
                        e.status = Status::NotAffected;
                    } else {
                        e.status = Status::Resolved;
                        e.fixed_version = fixed;
                    }
                    db.add(Ecosystem::Alpine, branch, pkg.name, std::move(e));
                }
            }
        }
    }
    return db;
}

std::set<std::string> query_cves(const CveDatabase& db, Ecosystem os, std::string_view release,
                                 std::string_view source_name, std::string_view source_version,
                                 const QueryOptions& opts) {
    std::set<std::string> out;
    const auto* entries = db.find(os, release, source_name);
    if (!entries) return out;
    auto still_vulnerable = [&](const CveEntry& e) {
        return !e.fixed_version || version::compare(os, *e.fixed_version, source_version) > 0;
    };
    for (const auto& e : *entries) {
        if (opts.cutoff_year && e.year() > *opts.cutoff_year) continue;
        bool hit = false;
        switch (e.status) {
        case Status::Open: hit = true; break;
        case Status::Resolved: hit = still_vulnerable(e); break;
        case Status::Unimportant: hit = opts.include_unimportant && still_vulnerable(e); break;
        case Status::NotAffected: hit = opts.include_not_affected; break;
        }
        if (hit) out.insert(e.id);
    }
    return out;
}

} // namespace sbomvert::tracker
