#include "sbomvert/scanner.hpp"

#include "sbomvert/error.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <map>
#include <sstream>

namespace sbomvert::scanner {

using purl::IssueCategory;

std::string_view to_string(MatchedVia m) noexcept { return m == MatchedVia::Source ? "source" : "binary"; }
std::string_view to_string(DedupeMode m) noexcept { return m == DedupeMode::PerBinary ? "per-binary" : "per-source"; }

std::vector<std::string> default_kernel_patterns() {
    // Debian kernel images and signed variants; Alpine flavours and headers.
    return {"linux", "linux-signed-*", "linux-lts", "linux-edge", "linux-virt", "linux-headers"};
}

bool is_kernel_source(std::string_view source_name, const std::vector<std::string>& patterns) {
    const std::string name(source_name);
    return std::ranges::any_of(patterns, [&](const std::string& p) { return fnmatch(p.c_str(), name.c_str(), 0) == 0; });
}

std::set<std::string> VulnReport::distinct_cves() const {
    std::set<std::string> out;
    for (const auto& f : findings) out.insert(f.cve_id);
    return out;
}

VulnReport scan(const dialect::CanonicalSbom& sbom, const tracker::CveDatabase& db, const ScanOptions& opts) {
    VulnReport report;
    report.options = opts;
    std::set<Finding> findings;
    std::size_t no_distro = 0, fallback = 0;

    for (const auto& c : sbom.packages) {
        if (c.is_source_synthetic) continue;
        const auto& distro = c.distro ? c.distro : sbom.distro;
        const auto release = distro ? distro->release_key() : std::nullopt;
        if (!release) {
            ++no_distro;
            continue;
        }
        const auto via = c.source_version ? MatchedVia::Source : MatchedVia::Binary;
        const auto source_version = c.source_version.value_or(c.full_version());
        if (via == MatchedVia::Binary) ++fallback;

        std::set<std::string> cves;
        try {
            cves = tracker::query_cves(db, distro->os, *release, c.source_name, source_version, opts.query);
        } catch (const Error& e) {
            report.warnings.push_back({IssueCategory::InvalidFormat, "unparsable-version", e.what(), c.name});
            continue;
        }
        PackageRef ref;
        if (opts.mode == DedupeMode::PerSource) {
            ref = {c.source_name, source_version, std::nullopt, c.source_name, source_version};
        } else {
            ref = {c.name, c.full_version(), c.arch, c.source_name, source_version};
        }
        for (const auto& id : cves) findings.insert({ref, id, via});
    }

    if (no_distro > 0) {
        report.warnings.push_back({IssueCategory::IncompleteData, "lossy-scan",
                                   std::to_string(no_distro) +
                                       " packages have no known distribution release and were not matched",
                                   ""});
    }
    if (fallback > 0) {
        report.warnings.push_back({IssueCategory::IncompleteData, "source-version-fallback",
                                   std::to_string(fallback) +
                                       " packages lack a source version; their binary version was queried",
                                   ""});
    }
    report.findings.assign(findings.begin(), findings.end());
    // A source queried via two binaries, one of them via the fallback, must
    // still report the CVE once per reference.
    auto same = [](const Finding& a, const Finding& b) { return a.package == b.package && a.cve_id == b.cve_id; };
    report.findings.erase(std::unique(report.findings.begin(), report.findings.end(), same), report.findings.end());
    return opts.exclude_kernel ? filter_kernel(report) : report;
}

VulnReport filter_kernel(const VulnReport& report) {
    VulnReport out = report;
    std::erase_if(out.findings, [&](const Finding& f) {
        return is_kernel_source(f.package.source_name, report.options.kernel_patterns);
    });
    out.kernel_filtered = true;
    out.options.exclude_kernel = true;
    return out;
}

nlohmann::ordered_json to_json(const VulnReport& report) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json options;
    options["mode"] = to_string(report.options.mode);
    options["exclude_kernel"] = report.kernel_filtered;
    options["kernel_patterns"] = report.options.kernel_patterns;
    options["cutoff_year"] = report.options.query.cutoff_year ? nlohmann::ordered_json(*report.options.query.cutoff_year)
                                                              : nlohmann::ordered_json(nullptr);
    options["include_unimportant"] = report.options.query.include_unimportant;
    j["options"] = std::move(options);

    auto findings = nlohmann::ordered_json::array();
    for (const auto& f : report.findings) {
        nlohmann::ordered_json item;
        item["package"] = f.package.name;
        item["version"] = f.package.version;
        if (f.package.arch) item["arch"] = *f.package.arch;
        item["source"] = f.package.source_name;
        item["source_version"] = f.package.source_version;
        item["cve"] = f.cve_id;
        item["matched_via"] = to_string(f.matched_via);
        findings.push_back(std::move(item));
    }
    j["findings"] = std::move(findings);
    j["summary"] = {{"findings", report.findings.size()}, {"distinct_cves", report.distinct_cves().size()}};
    j["warnings"] = dialect::to_json(report.warnings);
    return j;
}

std::string to_table(const VulnReport& report) {
    std::size_t wp = 7, wv = 7, ws = 6;
    for (const auto& f : report.findings) {
        wp = std::max(wp, f.package.name.size());
        wv = std::max(wv, f.package.version.size());
        ws = std::max(ws, f.package.source_name.size());
    }
    std::ostringstream out;
    auto row = [&](std::string_view a, std::string_view b, std::string_view c, std::string_view d) {
        out << a << std::string(wp - a.size() + 2, ' ') << b << std::string(wv - b.size() + 2, ' ') << c
            << std::string(ws - c.size() + 2, ' ') << d << '\n';
    };
    row("PACKAGE", "VERSION", "SOURCE", "CVE");
    for (const auto& f : report.findings) row(f.package.name, f.package.version, f.package.source_name, f.cve_id);
    out << report.findings.size() << " findings, " << report.distinct_cves().size() << " distinct CVEs\n";
    return out.str();
}

} // namespace sbomvert::scanner
