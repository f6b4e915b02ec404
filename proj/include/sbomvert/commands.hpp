#pragma once

#include "sbomvert/dialect.hpp"
#include "sbomvert/metrics.hpp"
#include "sbomvert/osdb.hpp"
#include "sbomvert/scanner.hpp"
#include "sbomvert/tracker.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

// The subcommands as functions over text, so they can be exercised without
// touching the filesystem. The CLI only does I/O around these.
namespace sbomvert::commands {

enum class Format { Json, Table, Csv };
Format format_from_string(std::string_view text);

struct Output {
    std::string content;
    std::optional<std::string> warnings;  // JSON for the "<output>.warnings.json" sidecar
};

/// Reads a file, or stdin for "-". Throws Error(InvalidArgument).
std::string read_input(const std::string& path);

/// "debian:12", "debian-12", "bookworm", "alpine:3.19", "alpine-3.19".
DistroInfo parse_distro_arg(std::string_view text);

enum class StateFormat { Dpkg, Apk };
/// apk records are single-letter "K:value" lines; everything else is dpkg.
StateFormat sniff_state_format(std::string_view text);
std::vector<osdb::OsPackage> parse_state(std::string_view text, std::optional<StateFormat> format = std::nullopt);

Output generate(std::string_view state_text, const DistroInfo& distro, std::optional<StateFormat> format = std::nullopt);

struct ConvertOptions {
    Dialect target = Dialect::Reference;
    std::optional<Dialect> source;  // detected when absent
    const osdb::SourceMap* reference = nullptr;
};
Output convert(std::string_view sbom_text, const ConvertOptions& opts);

std::string detect(std::string_view sbom_text);

struct TrackerFile {
    enum class Kind { Debian, Secdb } kind;
    std::string text;
    std::optional<std::string> release;  // secdb branch override
};
tracker::CveDatabase load_trackers(const std::vector<TrackerFile>& files);

struct ScanRequest {
    scanner::ScanOptions options;
    std::optional<Dialect> source;
    const osdb::SourceMap* reference = nullptr;
    Format format = Format::Json;
};
scanner::VulnReport scan_report(std::string_view sbom_text, const tracker::CveDatabase& db, const ScanRequest& req);
Output scan(std::string_view sbom_text, const tracker::CveDatabase& db, const ScanRequest& req);

/// Inverse of scanner::to_json, for reports written by scan.
scanner::VulnReport report_from_json(std::string_view text);

/// Jaccard over normalized package identities and over raw pURL strings,
/// plus the identities present on one side only and per-package field
/// differences (source, arch) for identities present on both.
Output diff(std::string_view a_text, std::string_view b_text);

struct EvalRequest {
    std::string dataset = "dataset";
    std::string tool = "tool";
    Format format = Format::Csv;
};
/// truth_text is a scan report or a plain list of CVE ids, one per line.
Output eval(std::string_view report_text, std::string_view truth_text, const EvalRequest& req);

} // namespace sbomvert::commands
