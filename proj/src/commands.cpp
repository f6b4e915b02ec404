#include "sbomvert/commands.hpp"

#include "sbomvert/error.hpp"
#include "sbomvert/purl.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <regex>
#include <sstream>

namespace sbomvert::commands {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::InvalidArgument, what); }

std::string lower(std::string_view s) {
    std::string out(s);
    std::ranges::transform(out, out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string dump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", metrics::round2(v));
    return buf;
}

dialect::CanonicalSbom load_canonical(std::string_view text, std::optional<Dialect> source,
                                      const osdb::SourceMap* reference, Dialect* detected = nullptr) {
    const auto doc = spdx::parse(text);
    const auto d = source.value_or(dialect::detect(doc));
    if (detected) *detected = d;
    return dialect::normalize(doc, d, {reference});
}

} // namespace

Format format_from_string(std::string_view text) {
    const auto t = lower(text);
    if (t == "json") return Format::Json;
    if (t == "table") return Format::Table;
    if (t == "csv") return Format::Csv;
    bad("unknown output format '" + std::string(text) + "'");
}

std::string read_input(const std::string& path) {
    if (path == "-") return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
    std::ifstream in(path, std::ios::binary);
    if (!in) bad("cannot read '" + path + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

DistroInfo parse_distro_arg(std::string_view text) {
    auto t = lower(text);
    std::replace(t.begin(), t.end(), ':', '-');
    if (t.starts_with("alpine-") || t == "edge" || std::regex_match(t, std::regex(R"(^v?\d+\.\d+(\.\d+)*$)"))) {
        if (auto d = purl::parse_distro(t, Ecosystem::Alpine).distro) return *d;
    }
    if (auto d = purl::parse_distro(t, Ecosystem::Debian).distro) return *d;
    bad("unrecognized distribution '" + std::string(text) + "'");
}

StateFormat sniff_state_format(std::string_view text) {
    std::istringstream in{std::string(text)};
    for (std::string line; std::getline(in, line);) {
        if (line.empty() || line == "\r") continue;
        return line.size() >= 2 && line[1] == ':' && std::isalpha(static_cast<unsigned char>(line[0]))
                   ? StateFormat::Apk
                   : StateFormat::Dpkg;
    }
    return StateFormat::Dpkg;
}

std::vector<osdb::OsPackage> parse_state(std::string_view text, std::optional<StateFormat> format) {
    return format.value_or(sniff_state_format(text)) == StateFormat::Apk ? osdb::parse_apk_installed(text)
                                                                         : osdb::parse_dpkg_status(text);
}

Output generate(std::string_view state_text, const DistroInfo& distro, std::optional<StateFormat> format) {
    const auto pkgs = parse_state(state_text, format);
    return {spdx::serialize(osdb::generate_reference_sbom(pkgs, distro)), std::nullopt};
}

Output convert(std::string_view sbom_text, const ConvertOptions& opts) {
    Dialect source = Dialect::Unknown;
    const auto canonical = load_canonical(sbom_text, opts.source, opts.reference, &source);
    const auto emission = dialect::emit(canonical, opts.target);

    nlohmann::ordered_json w;
    w["source_dialect"] = to_string(source);
    w["target_dialect"] = to_string(opts.target);
    w["packages"] = canonical.packages.size();
    w["normalization"] = dialect::to_json(canonical.lossiness);
    w["emission"] = dialect::to_json(emission.warnings);
    return {spdx::serialize(emission.document), dump(w)};
}

std::string detect(std::string_view sbom_text) {
    return std::string(to_string(dialect::detect(spdx::parse(sbom_text)))) + "\n";
}

tracker::CveDatabase load_trackers(const std::vector<TrackerFile>& files) {
    tracker::CveDatabase db;
    for (const auto& f : files) {
        db.merge(f.kind == TrackerFile::Kind::Debian ? tracker::load_debian_tracker(f.text)
                                                     : tracker::load_alpine_secdb(f.text, f.release));
    }
    return db;
}

scanner::VulnReport scan_report(std::string_view sbom_text, const tracker::CveDatabase& db, const ScanRequest& req) {
    const auto canonical = load_canonical(sbom_text, req.source, req.reference);
    auto report = scanner::scan(canonical, db, req.options);
    report.warnings.insert(report.warnings.begin(), canonical.lossiness.begin(), canonical.lossiness.end());
    return report;
}

Output scan(std::string_view sbom_text, const tracker::CveDatabase& db, const ScanRequest& req) {
    const auto report = scan_report(sbom_text, db, req);
    if (req.format == Format::Table) return {scanner::to_table(report), std::nullopt};
    if (req.format == Format::Csv) bad("scan reports are written as json or table");
    return {dump(scanner::to_json(report)), std::nullopt};
}

scanner::VulnReport report_from_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::MalformedJson, e.what());
    }
    if (!j.is_object() || !j.contains("findings") || !j["findings"].is_array()) {
        throw Error(ErrorCode::MissingRequiredField, "report has no 'findings' array");
    }
    scanner::VulnReport r;
    try {
        if (j.contains("options")) {
            const auto& o = j["options"];
            r.options.mode = o.value("mode", "per-binary") == "per-source" ? scanner::DedupeMode::PerSource
                                                                            : scanner::DedupeMode::PerBinary;
            r.kernel_filtered = o.value("exclude_kernel", false);
            r.options.exclude_kernel = r.kernel_filtered;
            if (o.contains("kernel_patterns")) r.options.kernel_patterns = o["kernel_patterns"].get<std::vector<std::string>>();
            if (o.contains("cutoff_year") && o["cutoff_year"].is_number_integer()) {
                r.options.query.cutoff_year = o["cutoff_year"].get<int>();
            }
            r.options.query.include_unimportant = o.value("include_unimportant", false);
        }
        for (const auto& f : j["findings"]) {
            scanner::Finding finding;
            finding.package.name = f.at("package").get<std::string>();
            finding.package.version = f.value("version", "");
            if (f.contains("arch")) finding.package.arch = f["arch"].get<std::string>();
            finding.package.source_name = f.value("source", finding.package.name);
            finding.package.source_version = f.value("source_version", finding.package.version);
            finding.cve_id = f.at("cve").get<std::string>();
            finding.matched_via =
                f.value("matched_via", "source") == "binary" ? scanner::MatchedVia::Binary : scanner::MatchedVia::Source;
            r.findings.push_back(std::move(finding));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedJson, std::string("report: ") + e.what());
    }
    std::ranges::sort(r.findings);
    return r;
}

Output diff(std::string_view a_text, std::string_view b_text) {
    const auto a_doc = spdx::parse(a_text);
    const auto b_doc = spdx::parse(b_text);
    const auto a = dialect::normalize(a_doc, dialect::detect(a_doc));
    const auto b = dialect::normalize(b_doc, dialect::detect(b_doc));

    // Only name and full version survive every dialect; source, arch and
    // distro are reported as per-package deltas instead of splitting keys.
    auto index = [](const dialect::CanonicalSbom& s) {
        std::map<std::string, const CanonicalPackage*> out;
        for (const auto& p : s.packages) {
            if (!p.is_source_synthetic) out.emplace(p.name + "@" + p.full_version(), &p);
        }
        return out;
    };
    auto key_set = [](const std::map<std::string, const CanonicalPackage*>& m) {
        std::set<std::string> out;
        for (const auto& [k, _] : m) out.insert(k);
        return out;
    };
    auto raw = [](const spdx::SpdxDocument& d) {
        std::set<std::string> out;
        for (const auto& p : d.packages) {
            if (const auto* ref = p.purl_ref()) out.insert(ref->locator);
        }
        return out;
    };
    const auto ia = index(a), ib = index(b);
    const auto ka = key_set(ia), kb = key_set(ib);
    std::vector<std::string> only_a, only_b;
    std::ranges::set_difference(ka, kb, std::back_inserter(only_a));
    std::ranges::set_difference(kb, ka, std::back_inserter(only_b));

    auto opt = [](const std::optional<std::string>& v) { return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(); };
    nlohmann::ordered_json deltas = nlohmann::ordered_json::array();
    for (const auto& [key, pa] : ia) {
        const auto it = ib.find(key);
        if (it == ib.end()) continue;
        const auto* pb = it->second;
        nlohmann::ordered_json fields = nlohmann::ordered_json::object();
        if (pa->source_name != pb->source_name) fields["source_name"] = {pa->source_name, pb->source_name};
        if (pa->source_version != pb->source_version) fields["source_version"] = {opt(pa->source_version), opt(pb->source_version)};
        if (pa->arch != pb->arch) fields["arch"] = {opt(pa->arch), opt(pb->arch)};
        if (!fields.empty()) deltas.push_back({{"package", key}, {"fields", std::move(fields)}});
    }

    nlohmann::ordered_json j;
    j["dialect_a"] = to_string(a.origin);
    j["dialect_b"] = to_string(b.origin);
    j["packages_a"] = ka.size();
    j["packages_b"] = kb.size();
    j["jaccard"] = metrics::jaccard(ka, kb);
    j["raw_purl_jaccard"] = metrics::jaccard(raw(a_doc), raw(b_doc));
    j["only_in_a"] = only_a;
    j["only_in_b"] = only_b;
    j["field_deltas"] = std::move(deltas);
    return {dump(j), std::nullopt};
}

Output eval(std::string_view report_text, std::string_view truth_text, const EvalRequest& req) {
    const auto report = report_from_json(report_text);
    std::set<std::string> truth;
    const auto first = std::ranges::find_if(truth_text, [](unsigned char c) { return !std::isspace(c); });
    if (first != truth_text.end() && *first == '{') {
        truth = report_from_json(truth_text).distinct_cves();
    } else {
        std::istringstream in{std::string(truth_text)};
        for (std::string line; std::getline(in, line);) {
            const auto hash = line.find('#');
            std::istringstream words(line.substr(0, hash));
            for (std::string id; words >> id;) {
                if (!tracker::is_cve_id(id)) bad("truth file: '" + id + "' is not a CVE id");
                truth.insert(id);
            }
        }
    }

    const auto m = metrics::compare_to_truth(report.distinct_cves(), truth);
    if (req.format == Format::Csv) {
        return {std::string(metrics::kCsvHeader) + "\n" + metrics::csv_row(req.dataset, req.tool, m) + "\n", std::nullopt};
    }
    const auto dup = metrics::duplication_stats(report);
    const auto br = metrics::cve_breakdown(report);
    if (req.format == Format::Table) {
        std::ostringstream out;
        out << "dataset " << req.dataset << "  tool " << req.tool << "\n"
            << "TP " << m.tp << "  FP " << m.fp << "  FN " << m.fn << "\n"
            << "precision " << fixed2(m.precision) << "  recall " << fixed2(m.recall) << "  f1 " << fixed2(m.f1) << "\n"
            << "packages per CVE set " << fixed2(dup.mean) << " (" << fixed2(dup.stderr_) << ")\n"
            << "source-only " << fixed2(br.pct_source_only()) << "%  duplicated " << fixed2(br.pct_duplicated_same_source())
            << "%  shared " << fixed2(br.pct_shared_across_sources()) << "%\n";
        return {out.str(), std::nullopt};
    }
    nlohmann::ordered_json j;
    j["dataset"] = req.dataset;
    j["tool"] = req.tool;
    j["metrics"] = metrics::to_json(m);
    j["duplication"] = {{"mean", dup.mean}, {"stderr", dup.stderr_}, {"groups", dup.groups}, {"packages", dup.packages}};
    nlohmann::ordered_json b;
    b["source_only"] = br.pct_source_only();
    b["duplicated_same_source"] = br.pct_duplicated_same_source();
    b["shared_across_sources"] = br.pct_shared_across_sources();
    j["breakdown"] = std::move(b);
    return {dump(j), std::nullopt};
}

} // namespace sbomvert::commands
