#pragma once

#include "sbomvert/dialect.hpp"
#include "sbomvert/tracker.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace sbomvert::scanner {

enum class MatchedVia { Source, Binary };
enum class DedupeMode { PerBinary, PerSource };

std::string_view to_string(MatchedVia m) noexcept;
std::string_view to_string(DedupeMode m) noexcept;

struct PackageRef {
    std::string name;
    std::string version;  // full, epoch included
    std::optional<std::string> arch;
    std::string source_name;
    std::string source_version;

    auto operator<=>(const PackageRef&) const = default;
};

struct Finding {
    PackageRef package;
    std::string cve_id;
    MatchedVia matched_via = MatchedVia::Source;

    auto operator<=>(const Finding&) const = default;
};

std::vector<std::string> default_kernel_patterns();
/// Shell-style pattern match of a source name against the kernel list.
bool is_kernel_source(std::string_view source_name, const std::vector<std::string>& patterns);

struct ScanOptions {
    DedupeMode mode = DedupeMode::PerBinary;
    bool exclude_kernel = false;
    std::vector<std::string> kernel_patterns = default_kernel_patterns();
    tracker::QueryOptions query;
};

struct VulnReport {
    std::vector<Finding> findings;  // sorted, no duplicate (package, cve)
    ScanOptions options;
    bool kernel_filtered = false;
    std::vector<dialect::TranslationWarning> warnings;

    [[nodiscard]] std::set<std::string> distinct_cves() const;
};

/// Never throws on package-level problems; they become warnings.
VulnReport scan(const dialect::CanonicalSbom& sbom, const tracker::CveDatabase& db, const ScanOptions& opts = {});

/// Copy of the report without findings whose source is a kernel package.
VulnReport filter_kernel(const VulnReport& report);

nlohmann::ordered_json to_json(const VulnReport& report);
std::string to_table(const VulnReport& report);

} // namespace sbomvert::scanner
