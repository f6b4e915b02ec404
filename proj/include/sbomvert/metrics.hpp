#pragma once

#include "sbomvert/scanner.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace sbomvert::metrics {

/// |a ∩ b| / |a ∪ b|; 1 when both are empty.
double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

struct Metrics {
    std::size_t tp = 0, fp = 0, fn = 0;
    double precision = 0, recall = 0, f1 = 0;
};

Metrics from_counts(std::size_t tp, std::size_t fp, std::size_t fn);
Metrics compare_to_truth(const std::set<std::string>& predicted, const std::set<std::string>& truth);

/// Half-up rounding to two decimals, as the result tables print ratios.
double round2(double v);

inline constexpr std::string_view kCsvHeader = "dataset,tool,true_pos,false_pos,false_neg,precision,recall,f1";
std::string csv_row(std::string_view dataset, std::string_view tool, const Metrics& m);
nlohmann::ordered_json to_json(const Metrics& m);

struct DuplicationStats {
    double mean = 0;
    double stderr_ = 0;  // sample standard deviation / sqrt(groups)
    std::size_t groups = 0;
    std::size_t packages = 0;
};

/// Vulnerable packages grouped by their exact CVE set.
DuplicationStats duplication_stats(const scanner::VulnReport& report);

struct CveBreakdown {
    std::size_t source_only = 0;
    std::size_t duplicated_same_source = 0;
    std::size_t shared_across_sources = 0;

    [[nodiscard]] std::size_t total() const { return source_only + duplicated_same_source + shared_across_sources; }
    [[nodiscard]] double pct_source_only() const;
    [[nodiscard]] double pct_duplicated_same_source() const;
    [[nodiscard]] double pct_shared_across_sources() const;
};

/// Every (package, CVE) finding in one class. Per source and CVE one binary
/// stands for the source (the one named like it, else the first by name);
/// it counts as shared when the CVE also appears under another source and
/// as source-only otherwise. The remaining binaries are duplicates.
CveBreakdown cve_breakdown(const scanner::VulnReport& report);

/// Package identity tuple used to compare SBOM contents.
std::set<std::string> package_identities(const std::vector<CanonicalPackage>& pkgs);

} // namespace sbomvert::metrics
