#include "sbomvert/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace sbomvert::metrics {

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) return 1.0;
    std::size_t common = 0;
    for (const auto& x : a) common += b.contains(x);
    return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

Metrics from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
    Metrics m{tp, fp, fn, 0, 0, 0};
    if (tp + fp > 0) m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    if (tp + fn > 0) m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    if (m.precision + m.recall > 0) m.f1 = 2 * m.precision * m.recall / (m.precision + m.recall);
    return m;
}

Metrics compare_to_truth(const std::set<std::string>& predicted, const std::set<std::string>& truth) {
    std::size_t tp = 0;
    for (const auto& x : predicted) tp += truth.contains(x);
    return from_counts(tp, predicted.size() - tp, truth.size() - tp);
}

double round2(double v) { return std::floor(v * 100.0 + 0.5 + 1e-9) / 100.0; }

std::string csv_row(std::string_view dataset, std::string_view tool, const Metrics& m) {
    char ratios[64];
    std::snprintf(ratios, sizeof ratios, "%.2f,%.2f,%.2f", round2(m.precision), round2(m.recall), round2(m.f1));
    return std::string(dataset) + "," + std::string(tool) + "," + std::to_string(m.tp) + "," + std::to_string(m.fp) +
           "," + std::to_string(m.fn) + "," + ratios;
}

nlohmann::ordered_json to_json(const Metrics& m) {
    nlohmann::ordered_json j;
    j["true_pos"] = m.tp;
    j["false_pos"] = m.fp;
    j["false_neg"] = m.fn;
    j["precision"] = m.precision;
    j["recall"] = m.recall;
    j["f1"] = m.f1;
    return j;
}

DuplicationStats duplication_stats(const scanner::VulnReport& report) {
    std::map<scanner::PackageRef, std::set<std::string>> by_package;
    for (const auto& f : report.findings) by_package[f.package].insert(f.cve_id);
    std::map<std::set<std::string>, std::size_t> groups;
    for (const auto& [pkg, cves] : by_package) groups[cves]++;

    DuplicationStats s;
    s.groups = groups.size();
    s.packages = by_package.size();
    if (s.groups == 0) return s;
    s.mean = static_cast<double>(s.packages) / static_cast<double>(s.groups);
    if (s.groups > 1) {
        double ss = 0;
        for (const auto& [cves, n] : groups) ss += (static_cast<double>(n) - s.mean) * (static_cast<double>(n) - s.mean);
        const auto sd = std::sqrt(ss / static_cast<double>(s.groups - 1));
        s.stderr_ = sd / std::sqrt(static_cast<double>(s.groups));
    }
    return s;
}

namespace {
double pct(std::size_t part, std::size_t total) {
    return total == 0 ? 0.0 : 100.0 * static_cast<double>(part) / static_cast<double>(total);
}
} // namespace

double CveBreakdown::pct_source_only() const { return pct(source_only, total()); }
double CveBreakdown::pct_duplicated_same_source() const { return pct(duplicated_same_source, total()); }
double CveBreakdown::pct_shared_across_sources() const { return pct(shared_across_sources, total()); }

CveBreakdown cve_breakdown(const scanner::VulnReport& report) {
    // cve -> sources it appears under; (source, cve) -> binaries
    std::map<std::string, std::set<std::string>> sources_of;
    std::map<std::pair<std::string, std::string>, std::vector<std::string>> binaries;
    for (const auto& f : report.findings) {
        sources_of[f.cve_id].insert(f.package.source_name);
        binaries[{f.package.source_name, f.cve_id}].push_back(f.package.name);
    }
    CveBreakdown b;
    for (auto& [key, names] : binaries) {
        const auto& [source, cve] = key;
        const bool shared = sources_of[cve].size() > 1;
        // names may repeat when one binary exists for several arches
        const auto rep = std::ranges::find(names, source) != names.end() ? source : *std::ranges::min_element(names);
        bool rep_seen = false;
        for (const auto& n : names) {
            if (n == rep && !rep_seen) {
                rep_seen = true;
                (shared ? b.shared_across_sources : b.source_only)++;
            } else {
                b.duplicated_same_source++;
            }
        }
    }
    return b;
}

std::set<std::string> package_identities(const std::vector<CanonicalPackage>& pkgs) {
    std::set<std::string> out;
    for (const auto& p : pkgs) {
        if (!p.is_source_synthetic) out.insert(p.identity_key());
    }
    return out;
}

} // namespace sbomvert::metrics
