#pragma once

#include "sbomvert/model.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace sbomvert::tracker {

enum class Status { Open, Resolved, Unimportant, NotAffected };

std::string_view to_string(Status s) noexcept;

struct CveEntry {
    std::string id;  // CVE-YYYY-N
    Status status = Status::Open;
    std::optional<std::string> fixed_version;
    std::optional<std::string> urgency;

    [[nodiscard]] int year() const;

    friend bool operator==(const CveEntry&, const CveEntry&) = default;
};

bool is_cve_id(std::string_view id);

/// (os, release, lowercase source name) -> entries.
class CveDatabase {
public:
    using Key = std::tuple<Ecosystem, std::string, std::string>;

    void add(Ecosystem os, std::string_view release, std::string_view source, CveEntry entry);
    void merge(const CveDatabase& other);

    [[nodiscard]] const std::vector<CveEntry>* find(Ecosystem os, std::string_view release, std::string_view source) const;
    [[nodiscard]] std::size_t size() const noexcept { return count_; }
    [[nodiscard]] bool empty() const noexcept { return count_ == 0; }
    [[nodiscard]] const std::map<Key, std::vector<CveEntry>>& entries() const noexcept { return entries_; }

    std::vector<std::string> snapshots;  // where the data came from

private:
    std::map<Key, std::vector<CveEntry>> entries_;
    std::size_t count_ = 0;
};

/// Debian security tracker JSON export:
/// source -> CVE -> {releases: {codename: {status, fixed_version, urgency}}}.
/// Non-CVE identifiers (TEMP-*) are skipped. Throws Error(MalformedTrackerData).
CveDatabase load_debian_tracker(std::string_view json_text);

/// Alpine secdb (JSON or YAML). The branch comes from "distroversion"
/// unless release is given. Throws Error(MalformedTrackerData).
CveDatabase load_alpine_secdb(std::string_view text, std::optional<std::string> release = std::nullopt);

struct QueryOptions {
    std::optional<int> cutoff_year;
    bool include_unimportant = false;
    bool include_not_affected = false;
};

/// CVE ids affecting source_version of source_name in the release. Throws
/// Error(UnparsableVersion) when a version cannot be compared.
std::set<std::string> query_cves(const CveDatabase& db, Ecosystem os, std::string_view release,
                                 std::string_view source_name, std::string_view source_version,
                                 const QueryOptions& opts = {});

} // namespace sbomvert::tracker
