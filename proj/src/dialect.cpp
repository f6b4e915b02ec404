#include "sbomvert/dialect.hpp"

#include "sbomvert/error.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <map>
#include <regex>
#include <set>

namespace sbomvert::dialect {

using purl::IssueCategory;

namespace {

constexpr std::string_view kToolName = "sbomvert";
constexpr std::string_view kToolVersion = "0.1.0";
constexpr std::string_view kDialectComment = "dialect=";

std::string lower(std::string_view s) {
    std::string out(s);
    std::ranges::transform(out, out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string upper(std::string_view s) {
    std::string out(s);
    std::ranges::transform(out, out.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return out;
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex(std::uint64_t v, int digits) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return std::string(buf + 16 - digits);
}

// SPDX identifiers allow letters, digits, '.' and '-'.
std::string id_safe(std::string_view s) {
    std::string out;
    for (unsigned char c : s) out.push_back(std::isalnum(c) || c == '.' || c == '-' ? static_cast<char>(c) : '-');
    return out;
}

bool is_os_marker(const spdx::SpdxPackage& p) {
    return p.is_operating_system() || std::ranges::find(p.attribution_texts, "Class: os-pkgs") != p.attribution_texts.end();
}

struct ParsedPackage {
    const spdx::SpdxPackage* spdx;
    purl::PackageUrl url;
    std::string raw;
};

std::vector<ParsedPackage> parsed_packages(const spdx::SpdxDocument& doc) {
    std::vector<ParsedPackage> out;
    for (const auto& p : doc.packages) {
        if (is_os_marker(p)) continue;
        const auto* ref = p.purl_ref();
        if (!ref) continue;
        try {
            out.push_back({&p, purl::parse(ref->locator), ref->locator});
        } catch (const Error&) {
            // unparseable pURLs carry no fingerprint
        }
    }
    return out;
}

std::optional<Dialect> dialect_from_creator(std::string_view creator) {
    const auto c = lower(creator);
    if (c.find("trivy") != std::string::npos) return Dialect::Trivy;
    for (auto key : {"syft", "grype", "anchore"}) {
        if (c.find(key) != std::string::npos) return Dialect::Anchore;
    }
    for (auto key : {"docker", "scout"}) {
        if (c.find(key) != std::string::npos) return Dialect::Docker;
    }
    for (auto key : {"sbom-tool", "microsoft"}) {
        if (c.find(key) != std::string::npos) return Dialect::Microsoft;
    }
    for (auto key : {"inspector", "amazon"}) {
        if (c.find(key) != std::string::npos) return Dialect::Amazon;
    }
    for (auto key : {"gcloud", "google", "artifact analysis", "container analysis"}) {
        if (c.find(key) != std::string::npos) return Dialect::Google;
    }
    return std::nullopt;
}

std::optional<DistroInfo> document_distro(const spdx::SpdxDocument& doc) {
    for (const auto& p : doc.packages) {
        if (!is_os_marker(p)) continue;
        auto os = lower(p.name);
        for (const auto& t : p.attribution_texts) {
            if (t.starts_with("Type: ")) os = lower(t.substr(6));
        }
        const auto eco = ecosystem_from_os_name(os);
        if (!eco) continue;
        const auto version = p.version_info.value_or("");
        if (version.empty()) continue;
        if (auto parsed = purl::parse_distro(version, *eco).distro) return parsed;
    }
    return std::nullopt;
}

std::string created_timestamp() {
    std::time_t t = 0;
    if (const char* sde = std::getenv("SOURCE_DATE_EPOCH")) {
        char* end = nullptr;
        const auto v = std::strtoll(sde, &end, 10);
        if (end && *end == '\0' && v >= 0) t = static_cast<std::time_t>(v);
    }
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void warn(std::vector<TranslationWarning>& out, IssueCategory cat, std::string code, std::string message,
          std::string package = {}) {
    out.push_back({cat, std::move(code), std::move(message), std::move(package)});
}

// Per-package findings of one kind collapse into a single warning.
class WarningTally {
public:
    void add(IssueCategory cat, const std::string& code, const std::string& message, const std::string& package) {
        auto [it, fresh] = entries_.try_emplace(code, Entry{cat, message, {}});
        it->second.packages.push_back(package);
        if (fresh) order_.push_back(code);
    }
    void flush(std::vector<TranslationWarning>& out) const {
        for (const auto& code : order_) {
            const auto& e = entries_.at(code);
            if (e.packages.size() == 1) {
                warn(out, e.category, code, e.message, e.packages.front());
            } else {
                warn(out, e.category, code,
                     e.message + " (" + std::to_string(e.packages.size()) + " packages, first: " + e.packages.front() + ")");
            }
        }
    }

private:
    struct Entry {
        IssueCategory category;
        std::string message;
        std::vector<std::string> packages;
    };
    std::map<std::string, Entry> entries_;
    std::vector<std::string> order_;
};

std::string package_label(const CanonicalPackage& c) { return c.name + "@" + c.full_version(); }

} // namespace

nlohmann::ordered_json to_json(const std::vector<TranslationWarning>& warnings) {
    auto out = nlohmann::ordered_json::array();
    for (const auto& w : warnings) {
        nlohmann::ordered_json j;
        j["category"] = purl::to_string(w.category);
        j["code"] = w.code;
        j["message"] = w.message;
        if (!w.package.empty()) j["package"] = w.package;
        out.push_back(std::move(j));
    }
    return out;
}

bool has_warning(const std::vector<TranslationWarning>& warnings, std::string_view code) {
    return std::ranges::any_of(warnings, [&](const TranslationWarning& w) { return w.code == code; });
}

std::string tool_creator() { return "Tool: " + std::string(kToolName) + "-" + std::string(kToolVersion); }

Dialect detect(const spdx::SpdxDocument& doc) {
    if (doc.creation_info) {
        const auto& ci = *doc.creation_info;
        const bool ours = std::ranges::find(ci.creators, tool_creator()) != ci.creators.end();
        if (ours && ci.comment) {
            const auto pos = ci.comment->find(kDialectComment);
            if (pos != std::string::npos) {
                const auto name = ci.comment->substr(pos + kDialectComment.size());
                if (auto d = dialect_from_string(name.substr(0, name.find_first_of(" ;,")))) return *d;
            }
        }
        for (const auto& creator : ci.creators) {
            if (auto d = dialect_from_creator(creator)) return *d;
        }
    }
    return detect_structural(doc);
}

Dialect detect_structural(const spdx::SpdxDocument& doc) {
    const auto pkgs = parsed_packages(doc);
    if (pkgs.empty()) return Dialect::Unknown;

    static const std::regex kDebianPoint(R"(^debian-\d+\.\d+$)");
    static const std::regex kNumbered(R"(^(debian|alpine)-\d+(\.\d+)*$)");
    auto any = [&](auto pred) { return std::ranges::any_of(pkgs, pred); };

    if (any([](const ParsedPackage& p) {
            const auto* arch = p.url.qualifier("arch");
            return p.url.type == "dpkg" || (arch && *arch != lower(*arch));
        })) {
        return Dialect::Amazon;
    }
    if (any([](const ParsedPackage& p) {
            return p.url.qualifier("os_name") || p.url.qualifier("os_version") || p.url.qualifier("os_distro");
        })) {
        return Dialect::Docker;
    }
    if (any([](const ParsedPackage& p) {
            const auto* distro = p.url.qualifier("distro");
            return p.url.qualifier("epoch") || (distro && std::regex_match(*distro, kDebianPoint)) ||
                   std::ranges::any_of(p.spdx->attribution_texts,
                                       [](const std::string& t) { return t.starts_with("PkgID:"); });
        })) {
        return Dialect::Trivy;
    }
    if (any([](const ParsedPackage& p) {
            const auto at = p.raw.rfind('@');
            if (at == std::string::npos) return false;
            const auto version = lower(p.raw.substr(at));
            return version.find("%3a") != std::string::npos;
        })) {
        return Dialect::Google;
    }
    if (any([](const ParsedPackage& p) {
            const auto* distro = p.url.qualifier("distro");
            return distro && std::regex_match(*distro, kNumbered);
        })) {
        return Dialect::Anchore;
    }
    if (std::ranges::all_of(pkgs, [](const ParsedPackage& p) {
            return !p.url.qualifier("arch") && !p.url.qualifier("distro");
        })) {
        return Dialect::Microsoft;
    }
    if (std::ranges::all_of(pkgs, [](const ParsedPackage& p) {
            const auto eco = purl::ecosystem_of(p.url);
            return eco && purl::validate_text(p.raw, *eco).empty();
        })) {
        return Dialect::Reference;
    }
    return Dialect::Unknown;
}

CanonicalSbom normalize(const spdx::SpdxDocument& doc, Dialect dialect, const NormalizeOptions& opts) {
    CanonicalSbom out;
    out.origin = dialect;
    out.name = doc.name;
    auto& warnings = out.lossiness;
    if (dialect == Dialect::Unknown) {
        warn(warnings, IssueCategory::FormatReliance, "unknown-dialect",
             "producer not recognized; applying reference rules");
    }

    out.distro = document_distro(doc);
    WarningTally tally;
    std::set<std::string> generated_from;  // SPDXIDs named as the origin of another package
    for (const auto& r : doc.relationships) {
        if (r.type == "GENERATED_FROM") generated_from.insert(r.related);
        if (r.type == "GENERATES") generated_from.insert(r.element);
    }

    struct Entry {
        CanonicalPackage pkg;
        std::string spdx_id;
        bool upstream_flagged = false;
    };
    std::vector<Entry> entries;

    for (const auto& p : doc.packages) {
        if (is_os_marker(p)) continue;
        const auto* ref = p.purl_ref();
        if (!ref) {
            tally.add(IssueCategory::IncompleteData, "no-purl", "package has no pURL and was skipped", p.name);
            continue;
        }
        try {
            auto url = purl::parse(ref->locator);
            const auto eco = purl::ecosystem_of(url) ? purl::ecosystem_of(url)
                             : out.distro             ? std::optional(out.distro->os)
                                                      : std::nullopt;
            if (eco) {
                for (const auto& issue : purl::validate_text(ref->locator, *eco)) {
                    tally.add(issue.category, "purl-" + issue.code, issue.message, p.name);
                }
            }

            purl::PackageSidecar sidecar;
            sidecar.version_info = p.version_info;
            sidecar.source_info = p.source_info;
            sidecar.distro = out.distro;

            if (dialect == Dialect::Anchore && p.version_info && !p.version_info->empty()) {
                url.version = *p.version_info;
                if (p.version_info->find(':') != std::string::npos) url.qualifiers.erase("epoch");
            }
            if (dialect == Dialect::Amazon && p.version_info && p.version_info->find(':') != std::string::npos) {
                const auto info_epoch = split_epoch(*p.version_info).first;
                if (const auto* q = url.qualifier("epoch"); q && *q != std::to_string(info_epoch)) {
                    tally.add(IssueCategory::IncorrectInformation, "epoch-mismatch",
                              "epoch qualifier disagrees with versionInfo; versionInfo kept", p.name);
                    url.qualifiers.erase("epoch");
                    url.version = *p.version_info;
                }
            }
            if (dialect == Dialect::Trivy && !p.source_info) {
                tally.add(IssueCategory::FormatReliance, "missing-source-info",
                          "Trivy package without sourceInfo; source taken from the pURL", p.name);
            }

            Entry e{purl::to_canonical(url, sidecar), p.spdx_id, false};
            if (e.pkg.unrecognized_distro) {
                tally.add(IssueCategory::InvalidFormat, "unrecognized-distro",
                          "distro '" + *e.pkg.unrecognized_distro + "' kept verbatim", p.name);
            }
            if (!p.source_info) {
                if (const auto* up = url.qualifier("upstream"); up && e.pkg.source_name == e.pkg.name && *up != e.pkg.name) {
                    e.upstream_flagged = up->ends_with(".src.dpkg");
                }
            }
            entries.push_back(std::move(e));
        } catch (const Error& err) {
            tally.add(IssueCategory::InvalidFormat, "unusable-package", err.what(), p.name);
        }
    }

    // Upstream repair against the installed database.
    for (auto& e : entries) {
        const osdb::SourceMap::mapped_type* truth = nullptr;
        if (opts.reference) {
            if (auto it = opts.reference->find(e.pkg.name); it != opts.reference->end()) truth = &it->second;
        }
        if (truth) {
            if (truth->first != e.pkg.source_name) {
                tally.add(IssueCategory::IncorrectInformation, "upstream-repaired",
                          "source '" + e.pkg.source_name + "' replaced by '" + truth->first + "' from the package database",
                          e.pkg.name);
                e.pkg.source_name = truth->first;
                e.pkg.source_version = truth->second;
            } else if (!e.pkg.source_version) {
                e.pkg.source_version = truth->second;
            }
        } else if (e.upstream_flagged) {
            tally.add(IssueCategory::IncorrectInformation, "self-referential-upstream",
                      "upstream names the package itself; the real source is unknown without a package database",
                      e.pkg.name);
        }
    }

    // Entries invented for source packages.
    const bool invents_sources = dialect == Dialect::Amazon || dialect == Dialect::Docker;
    for (auto& x : entries) {
        bool synthetic = generated_from.contains(x.spdx_id);
        if (!synthetic && invents_sources) {
            const bool paired = std::ranges::any_of(entries, [&](const Entry& y) {
                return &y != &x && y.pkg.name != x.pkg.name && y.pkg.source_name == x.pkg.name &&
                       y.pkg.source_version.value_or(y.pkg.full_version()) == x.pkg.full_version();
            });
            // Without a database, an arch-less entry is the tell: a source
            // package has no architecture of its own.
            synthetic = paired && (opts.reference ? !opts.reference->contains(x.pkg.name) : !x.pkg.arch);
        }
        if (synthetic) {
            if (opts.reference && opts.reference->contains(x.pkg.name)) continue;
            x.pkg.is_source_synthetic = true;
            tally.add(IssueCategory::IncorrectInformation, "synthetic-source-entry",
                      "entry stands for a source package, not an installed binary; dropped", package_label(x.pkg));
        }
    }

    std::map<std::string, std::size_t> seen;
    for (auto& e : entries) {
        if (e.pkg.is_source_synthetic) continue;
        auto& c = e.pkg;
        const auto key = c.name + "|" + c.full_version() + "|" + c.arch.value_or("");
        if (auto it = seen.find(key); it != seen.end()) {
            auto& kept = out.packages[it->second];
            if (!kept.source_version && c.source_version) kept.source_version = c.source_version;
            if (!kept.distro && c.distro) kept.distro = c.distro;
            tally.add(IssueCategory::IncorrectInformation, "duplicate-merged", "duplicate package entry merged",
                      package_label(c));
            continue;
        }
        seen.emplace(key, out.packages.size());
        out.packages.push_back(std::move(c));
    }

    if (out.packages.empty() && !doc.packages.empty() &&
        std::ranges::any_of(doc.packages, [](const spdx::SpdxPackage& p) { return !is_os_marker(p); })) {
        throw Error(ErrorCode::NormalizationFailed, "no package yields a usable identity");
    }

    if (!out.distro) {
        // Fall back to the distro most packages agree on.
        std::map<std::string, std::pair<std::size_t, DistroInfo>> votes;
        for (const auto& c : out.packages) {
            if (!c.distro) continue;
            auto& v = votes[c.distro->os_name() + "|" + c.distro->version_id];
            v.first++;
            v.second = *c.distro;
        }
        std::size_t best = 0;
        for (const auto& [key, v] : votes) {
            if (v.first > best) {
                best = v.first;
                out.distro = v.second;
            }
        }
    }
    if (!out.distro && !out.packages.empty()) {
        warn(warnings, IssueCategory::IncompleteData, "distro-missing",
             "no operating system distribution recorded; release-scoped CVE lookups are impossible");
    }
    if (std::ranges::any_of(out.packages, [](const CanonicalPackage& c) { return !c.arch; })) {
        warn(warnings, IssueCategory::IncompleteData, "arch-missing", "some packages carry no architecture");
    }
    tally.flush(warnings);
    return out;
}

Emission emit(const CanonicalSbom& sbom, Dialect target) {
    if (target == Dialect::Unknown) throw Error(ErrorCode::InvalidArgument, "cannot emit the Unknown dialect");

    Emission result;
    auto& doc = result.document;
    auto& warnings = result.warnings;
    WarningTally tally;

    std::vector<const CanonicalPackage*> pkgs;
    for (const auto& c : sbom.packages) {
        if (!c.is_source_synthetic) pkgs.push_back(&c);
    }
    std::ranges::sort(pkgs, [](const CanonicalPackage* a, const CanonicalPackage* b) {
        return std::tie(a->name, a->epoch, a->version, a->arch) < std::tie(b->name, b->epoch, b->version, b->arch);
    });

    std::string digest_input;
    for (const auto* c : pkgs) digest_input += c->identity_key() + "\n";
    if (sbom.distro) digest_input += sbom.distro->os_name() + sbom.distro->version_id;

    const auto base_name = sbom.name.value_or(
        sbom.distro ? sbom.distro->os_name() + "-" + sbom.distro->release_key().value_or(sbom.distro->version_id)
                    : std::string("unknown-os"));
    doc.spdx_version = "SPDX-2.3";
    doc.data_license = "CC0-1.0";
    doc.name = base_name;
    doc.document_namespace = "https://sbomvert.invalid/spdx/" + id_safe(base_name) + "-" +
                             lower(to_string(target)) + "-" + hex(fnv1a(digest_input), 16);
    spdx::CreationInfo ci;
    ci.creators = {tool_creator()};
    ci.created = created_timestamp();
    ci.comment = std::string(kDialectComment) + lower(to_string(target));
    doc.creation_info = ci;

    std::string os_id;
    if (sbom.distro) {
        spdx::SpdxPackage os;
        os.spdx_id = "SPDXRef-OperatingSystem-" + sbom.distro->os_name();
        os_id = os.spdx_id;
        os.name = sbom.distro->os_name();
        os.version_info = !sbom.distro->version_id.empty() ? sbom.distro->version_id
                                                          : sbom.distro->codename.value_or("unknown");
        os.download_location = "NOASSERTION";
        os.primary_package_purpose = std::string(spdx::kOperatingSystemPurpose);
        if (target == Dialect::Trivy || target == Dialect::Reference) {
            os.attribution_texts = {"Class: os-pkgs", "Type: " + sbom.distro->os_name()};
        }
        os.extras["filesAnalyzed"] = false;
        doc.packages.push_back(std::move(os));
    } else {
        warn(warnings, IssueCategory::IncompleteData, "distro-missing",
             "no distribution known: operating-system entry and distro qualifiers omitted");
    }

    std::set<std::string> used_ids{doc.spdx_id, os_id};
    for (const auto* cp : pkgs) {
        const auto& c = *cp;
        const auto distro = c.distro ? c.distro : sbom.distro;
        const auto eco = distro ? distro->os : Ecosystem::Debian;
        const bool debian = eco == Ecosystem::Debian;
        const auto label = package_label(c);

        purl::PackageUrl url;
        url.type = debian ? "deb" : "apk";
        url.ns = debian ? "debian" : "alpine";
        url.name = c.name;
        url.version = c.full_version();
        const auto source_version = c.source_version.value_or(c.full_version());
        const auto release = distro ? distro->release_key() : std::nullopt;
        const auto version_id =
            distro ? (distro->version_id.empty() ? distro->codename.value_or("") : distro->version_id) : std::string();

        purl::SerializeOptions sopts;
        switch (target) {
        case Dialect::Reference:
            if (c.arch) url.qualifiers["arch"] = *c.arch;
            if (release) url.qualifiers["distro"] = *release;
            break;
        case Dialect::Trivy:
            url.version = c.version;
            if (c.epoch > 0) url.qualifiers["epoch"] = std::to_string(c.epoch);
            if (c.arch) url.qualifiers["arch"] = *c.arch;
            if (distro) url.qualifiers["distro"] = debian ? "debian-" + version_id : version_id;
            break;
        case Dialect::Google:
            sopts.encode_version_colon = true;
            [[fallthrough]];
        case Dialect::Anchore:
            if (c.arch) url.qualifiers["arch"] = *c.arch;
            if (distro) url.qualifiers["distro"] = (debian ? "debian-" : "alpine-") + version_id;
            if (c.source_name != c.name || source_version != c.full_version()) {
                url.qualifiers["upstream"] =
                    source_version == c.full_version() ? c.source_name : c.source_name + "@" + source_version;
            }
            break;
        case Dialect::Microsoft:
            if (c.arch) tally.add(IssueCategory::IncompleteData, "arch-dropped", "target pURLs carry no architecture", label);
            break;
        case Dialect::Amazon:
            if (debian) {
                url.type = "dpkg";
                url.ns.reset();
                url.version = c.version;
                if (c.epoch > 0) url.qualifiers["epoch"] = std::to_string(c.epoch);
                if (c.source_version || c.source_name != c.name) {
                    url.qualifiers["upstream"] = c.source_name + "-" + split_epoch(source_version).second + ".src.dpkg";
                }
            } else {
                url.ns.reset();
                if (c.source_name != c.name) url.qualifiers["upstream"] = c.source_name;
            }
            if (c.arch) url.qualifiers["arch"] = upper(*c.arch);
            break;
        case Dialect::Docker:
            if (c.arch) url.qualifiers["arch"] = *c.arch;
            if (distro) {
                url.qualifiers["os_name"] = distro->os_name();
                url.qualifiers["os_version"] = version_id;
                if (distro->codename) url.qualifiers["os_distro"] = *distro->codename;
            }
            break;
        case Dialect::Unknown:
            break;
        }

        spdx::SpdxPackage p;
        p.name = c.name;
        auto id = "SPDXRef-Package-" + id_safe(c.name) + "-" + hex(fnv1a(c.identity_key()), 8);
        for (int n = 2; used_ids.contains(id); ++n) id += "-" + std::to_string(n);
        used_ids.insert(id);
        p.spdx_id = id;
        p.version_info = c.full_version();
        p.download_location = "NOASSERTION";
        if (c.source_version) {
            p.source_info = purl::format_source_info(c.source_name, *c.source_version);
        } else if (target == Dialect::Trivy) {
            p.source_info = purl::format_source_info(c.source_name, c.full_version());
            tally.add(IssueCategory::IncompleteData, "source-version-guessed",
                      "source version unknown; binary version written to sourceInfo", label);
        }
        if (target == Dialect::Docker) p.primary_package_purpose = "LIBRARY";
        if (target == Dialect::Trivy) p.attribution_texts = {"PkgID: " + c.name + "@" + c.full_version()};
        p.external_refs.push_back({"PACKAGE-MANAGER", "purl", purl::serialize(url, sopts)});
        p.extras["filesAnalyzed"] = false;
        if (!distro) tally.add(IssueCategory::IncompleteData, "distro-unknown", "package has no distribution", label);
        doc.packages.push_back(std::move(p));
    }

    if (!os_id.empty()) {
        doc.relationships.push_back({std::string(spdx::kDocumentId), "DESCRIBES", os_id});
        for (std::size_t i = 1; i < doc.packages.size(); ++i) {
            doc.relationships.push_back({os_id, "CONTAINS", doc.packages[i].spdx_id});
        }
    } else {
        for (const auto& p : doc.packages) doc.relationships.push_back({std::string(spdx::kDocumentId), "DESCRIBES", p.spdx_id});
    }
    tally.flush(warnings);
    return result;
}

} // namespace sbomvert::dialect
