#include "sbomvert/purl.hpp"

#include "sbomvert/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <regex>

namespace sbomvert::purl {

namespace {

[[noreturn]] void malformed(std::string_view text, const std::string& why) {
    throw Error(ErrorCode::MalformedPurl, "'" + std::string(text) + "': " + why);
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::ranges::transform(out, out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool is_unreserved(unsigned char c) {
    return std::isalnum(c) || c == '-' || c == '.' || c == '_' || c == '~';
}

bool is_token(std::string_view s) {
    return !s.empty() && std::ranges::all_of(s, [](unsigned char c) {
        return std::islower(c) || std::isdigit(c) || c == '.' || c == '-' || c == '_';
    });
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

std::optional<std::uint32_t> parse_uint(std::string_view s) {
    std::uint32_t value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

bool has_upper(std::string_view s) {
    return std::ranges::any_of(s, [](unsigned char c) { return std::isupper(c); });
}

} // namespace

const std::string* PackageUrl::qualifier(const std::string& key) const {
    const auto it = qualifiers.find(key);
    return it == qualifiers.end() ? nullptr : &it->second;
}

std::string percent_encode(std::string_view text, std::string_view keep) {
    static constexpr char kHex[] = "0123456789ABCDEF";
    std::string out;
    out.reserve(text.size());
    for (const unsigned char c : text) {
        if (is_unreserved(c) || keep.find(static_cast<char>(c)) != std::string_view::npos) {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(kHex[c >> 4]);
            out.push_back(kHex[c & 0xF]);
        }
    }
    return out;
}

std::string percent_decode(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '%') {
            out.push_back(text[i]);
            continue;
        }
        if (i + 2 >= text.size()) malformed(text, "truncated percent escape");
        const int hi = hex_value(text[i + 1]);
        const int lo = hex_value(text[i + 2]);
        if (hi < 0 || lo < 0) malformed(text, "invalid percent escape");
        out.push_back(static_cast<char>(hi * 16 + lo));
        i += 2;
    }
    return out;
}

PackageUrl parse(std::string_view text) {
    if (!text.starts_with("pkg:")) malformed(text, "missing 'pkg:' scheme");
    std::string_view rest = text.substr(4);
    while (rest.starts_with('/')) rest.remove_prefix(1);

    PackageUrl p;

    if (const auto hash = rest.rfind('#'); hash != std::string_view::npos) {
        std::vector<std::string> segments;
        for (const auto seg : split(rest.substr(hash + 1), '/')) {
            if (seg.empty() || seg == "." || seg == "..") continue;
            segments.push_back(percent_decode(seg));
        }
        rest = rest.substr(0, hash);
        if (!segments.empty()) {
            std::string joined;
            for (const auto& s : segments) joined += (joined.empty() ? "" : "/") + s;
            p.subpath = std::move(joined);
        }
    }

    if (const auto q = rest.rfind('?'); q != std::string_view::npos) {
        for (const auto pair : split(rest.substr(q + 1), '&')) {
            if (pair.empty()) continue;
            const auto eq = pair.find('=');
            if (eq == std::string_view::npos) malformed(text, "qualifier without '='");
            auto key = to_lower(pair.substr(0, eq));
            if (!is_token(key)) malformed(text, "invalid qualifier key '" + key + "'");
            auto value = percent_decode(pair.substr(eq + 1));
            if (value.empty()) continue;
            if (!p.qualifiers.emplace(key, std::move(value)).second) {
                malformed(text, "duplicate qualifier '" + key + "'");
            }
        }
        rest = rest.substr(0, q);
    }

    const auto slash = rest.find('/');
    if (slash == std::string_view::npos) malformed(text, "missing name");
    p.type = to_lower(rest.substr(0, slash));
    if (!is_token(p.type)) malformed(text, "invalid type");
    rest = rest.substr(slash + 1);
    while (rest.ends_with('/')) rest.remove_suffix(1);

    const auto last_slash = rest.rfind('/');
    const auto name_start = last_slash == std::string_view::npos ? 0 : last_slash + 1;
    if (const auto at = rest.find('@', name_start); at != std::string_view::npos) {
        auto version = percent_decode(rest.substr(at + 1));
        if (version.empty()) malformed(text, "empty version after '@'");
        p.version = std::move(version);
        rest = rest.substr(0, at);
    }

    p.name = percent_decode(rest.substr(name_start));
    if (p.name.empty()) malformed(text, "empty name");

    if (name_start > 0) {
        std::string ns;
        for (const auto seg : split(rest.substr(0, name_start - 1), '/')) {
            if (seg.empty()) continue;
            ns += (ns.empty() ? "" : "/") + percent_decode(seg);
        }
        if (!ns.empty()) p.ns = std::move(ns);
    }
    return p;
}

std::string serialize(const PackageUrl& p, SerializeOptions opts) {
    std::string out = "pkg:" + to_lower(p.type) + "/";
    if (p.ns) {
        for (const auto seg : split(*p.ns, '/')) out += percent_encode(seg) + "/";
    }
    out += percent_encode(p.name);
    if (p.version) out += "@" + percent_encode(*p.version, opts.encode_version_colon ? "" : ":");
    char sep = '?';
    for (const auto& [key, value] : p.qualifiers) {
        if (value.empty()) continue;
        out += sep;
        out += key + "=" + percent_encode(value, ":/");
        sep = '&';
    }
    if (p.subpath) {
        out += '#';
        bool first = true;
        for (const auto seg : split(*p.subpath, '/')) {
            if (!first) out += '/';
            out += percent_encode(seg);
            first = false;
        }
    }
    return out;
}

std::string_view to_string(IssueCategory c) noexcept {
    switch (c) {
    case IssueCategory::InvalidFormat: return "InvalidFormat";
    case IssueCategory::IncompleteData: return "IncompleteData";
    case IssueCategory::IncorrectInformation: return "IncorrectInformation";
    case IssueCategory::FormatReliance: return "FormatReliance";
    }
    return "InvalidFormat";
}

std::optional<Ecosystem> ecosystem_of(const PackageUrl& p) {
    if (p.type == "deb" || p.type == "dpkg") return Ecosystem::Debian;
    if (p.type == "apk") return Ecosystem::Alpine;
    return std::nullopt;
}

DistroParse parse_distro(std::string_view value, Ecosystem ecosystem) {
    static const std::regex kDebianNumbered(R"(^debian-(\d+)(\.\d+)*$)");
    static const std::regex kNumber(R"(^(\d+)(\.\d+)*$)");
    static const std::regex kAlpine(R"(^(?:alpine-)?v?(\d+\.\d+)(\.\d+)*$)");

    const auto lower = to_lower(value);
    std::smatch m;
    if (ecosystem == Ecosystem::Debian) {
        if (lower == "sid" || lower == "unstable") {
            return {DistroInfo{Ecosystem::Debian, "", std::string("sid")}, std::nullopt};
        }
        if (auto version = debian_version_for(lower)) {
            return {DistroInfo{Ecosystem::Debian, *version, lower}, std::nullopt};
        }
        if (std::regex_match(lower, m, kDebianNumbered) || std::regex_match(lower, m, kNumber)) {
            const auto major = m[1].str();
            return {DistroInfo{Ecosystem::Debian, major, debian_codename_for(major)}, std::nullopt};
        }
        return {std::nullopt, std::string(value)};
    }
    if (lower == "edge" || lower == "alpine-edge") {
        return {DistroInfo{Ecosystem::Alpine, "edge", std::nullopt}, std::nullopt};
    }
    if (std::regex_match(lower, m, kAlpine)) {
        return {DistroInfo{Ecosystem::Alpine, m[1].str(), std::nullopt}, std::nullopt};
    }
    return {std::nullopt, std::string(value)};
}

namespace {

bool is_self_referential_upstream(const PackageUrl& p, std::string_view upstream) {
    if (upstream == p.name) return true;
    if (!p.version) return false;
    const auto bare = p.version->substr(p.version->find(':') == std::string::npos ? 0 : p.version->find(':') + 1);
    return upstream == p.name + "-" + bare + ".src.dpkg" || upstream == p.name + "-" + *p.version + ".src.dpkg";
}

void add(std::vector<ComplianceIssue>& out, IssueCategory cat, std::string code, std::string message,
         std::string field) {
    out.push_back({cat, std::move(code), std::move(message), std::move(field)});
}

} // namespace

std::vector<ComplianceIssue> validate(const PackageUrl& p, Ecosystem ecosystem) {
    std::vector<ComplianceIssue> issues;
    const bool debian = ecosystem == Ecosystem::Debian;
    const std::string_view expected_type = debian ? "deb" : "apk";
    const std::string_view expected_ns = debian ? "debian" : "alpine";

    if (p.type != expected_type) {
        add(issues, IssueCategory::InvalidFormat, "nonstandard-type",
            "type '" + p.type + "' is not the standard '" + std::string(expected_type) + "'", "type");
    }
    if (!p.ns) {
        add(issues, IssueCategory::IncompleteData, "missing-namespace", "namespace is missing", "namespace");
    } else if (debian ? (*p.ns != "debian" && *p.ns != "ubuntu") : *p.ns != expected_ns) {
        add(issues, IssueCategory::InvalidFormat, "unexpected-namespace", "namespace '" + *p.ns + "' is unexpected",
            "namespace");
    }
    if (!p.version) {
        add(issues, IssueCategory::IncompleteData, "missing-version", "version is missing", "version");
    }

    for (const auto& [key, value] : p.qualifiers) {
        const auto field = "qualifiers." + key;
        if (key == "arch" || key == "distro") {
            if (has_upper(value)) {
                add(issues, IssueCategory::InvalidFormat, "uppercase-qualifier-value",
                    key + " value '" + value + "' must be lowercase", field);
            }
            continue;
        }
        if (key == "epoch") {
            add(issues, IssueCategory::InvalidFormat, "epoch-qualifier",
                "epoch qualifier does not apply; the epoch belongs in the version", field);
        } else {
            add(issues, IssueCategory::InvalidFormat, "unknown-qualifier", "qualifier '" + key + "' is not defined",
                field);
        }
        if (key == "upstream" && is_self_referential_upstream(p, value)) {
            add(issues, IssueCategory::IncorrectInformation, "self-referential-upstream",
                "upstream '" + value + "' is derived from the package itself, not its source package", field);
        }
    }

    if (!p.qualifier("arch")) {
        add(issues, IssueCategory::IncompleteData, "missing-arch", "arch qualifier is missing", "qualifiers.arch");
    }
    if (const auto* distro = p.qualifier("distro"); !distro) {
        add(issues, IssueCategory::IncompleteData, "missing-distro", "distro qualifier is missing",
            "qualifiers.distro");
    } else if (debian) {
        if (!debian_version_for(to_lower(*distro)) && to_lower(*distro) != "sid") {
            add(issues, IssueCategory::InvalidFormat, "distro-not-codename",
                "distro '" + *distro + "' is not a release codename", "qualifiers.distro");
        }
    } else {
        static const std::regex kBranch(R"(^(\d+\.\d+)(\.\d+)*$|^edge$)");
        if (!std::regex_match(*distro, kBranch)) {
            add(issues, IssueCategory::InvalidFormat, "distro-format",
                "distro '" + *distro + "' is not an Alpine release number", "qualifiers.distro");
        }
    }
    return issues;
}

std::vector<ComplianceIssue> validate_text(std::string_view text, Ecosystem ecosystem) {
    PackageUrl p;
    try {
        p = parse(text);
    } catch (const Error& e) {
        return {{IssueCategory::InvalidFormat, "unparseable", e.what(), "purl"}};
    }
    auto issues = validate(p, ecosystem);

    // Raw name and version segments as they appear in the text.
    std::string_view rest = text.substr(4);
    rest = rest.substr(0, std::min(rest.find('?'), rest.find('#')));
    const auto name_start = rest.rfind('/') == std::string_view::npos ? 0 : rest.rfind('/') + 1;
    auto segment = rest.substr(name_start);
    std::string_view raw_version;
    if (const auto at = segment.find('@'); at != std::string_view::npos) {
        raw_version = segment.substr(at + 1);
        segment = segment.substr(0, at);
    }
    const bool unencoded = std::ranges::any_of(segment, [](unsigned char c) { return !is_unreserved(c) && c != '%'; });
    if (unencoded) {
        add(issues, IssueCategory::InvalidFormat, "unencoded-name",
            "name '" + std::string(segment) + "' contains characters that must be percent-encoded", "name");
    }
    if (to_lower(raw_version).find("%3a") != std::string::npos) {
        add(issues, IssueCategory::InvalidFormat, "encoded-epoch-separator",
            "epoch separator ':' is percent-encoded in the version", "version");
    }
    return issues;
}

bool has_issue(const std::vector<ComplianceIssue>& issues, std::string_view code) {
    return std::ranges::any_of(issues, [&](const ComplianceIssue& i) { return i.code == code; });
}

std::optional<std::pair<std::string, std::string>> parse_source_info(std::string_view text) {
    static constexpr std::string_view kPrefix = "built package from:";
    auto pos = text.find(kPrefix);
    if (pos == std::string_view::npos) return std::nullopt;
    auto rest = text.substr(pos + kPrefix.size());
    auto trim = [](std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
        return s;
    };
    rest = trim(rest);
    const auto space = rest.find_first_of(" \t");
    if (rest.empty() || space == std::string_view::npos) return std::nullopt;
    const auto name = rest.substr(0, space);
    const auto version = trim(rest.substr(space));
    if (version.empty() || version.find_first_of(" \t") != std::string_view::npos) return std::nullopt;
    // "0:v" and "v" are the same version.
    std::string normalized(version);
    if (normalized.starts_with("0:")) normalized.erase(0, 2);
    return std::make_pair(std::string(name), normalized);
}

std::string format_source_info(std::string_view source_name, std::string_view source_version) {
    std::string version(source_version);
    if (version.starts_with("0:")) version.erase(0, 2);
    return "built package from: " + std::string(source_name) + " " + version;
}

namespace {

bool plausible_package_name(std::string_view s) {
    static const std::regex kName(R"(^[a-z0-9][a-z0-9+._-]*$)");
    return std::regex_match(s.begin(), s.end(), kName);
}

// Splits "<source>-<version>" where the version starts at a '-' followed by
// a digit. Prefers the split whose version equals `hint`.
std::optional<std::pair<std::string, std::string>> split_name_version(std::string_view s, std::string_view hint) {
    std::optional<std::pair<std::string, std::string>> first;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        if (s[i] != '-' || !std::isdigit(static_cast<unsigned char>(s[i + 1]))) continue;
        std::pair<std::string, std::string> candidate{std::string(s.substr(0, i)), std::string(s.substr(i + 1))};
        if (candidate.second == hint) return candidate;
        if (!first) first = std::move(candidate);
    }
    return first;
}

} // namespace

CanonicalPackage to_canonical(const PackageUrl& p, const PackageSidecar& sidecar) {
    auto ecosystem = ecosystem_of(p);
    if (!ecosystem && sidecar.distro) ecosystem = sidecar.distro->os;
    if (!ecosystem) throw Error(ErrorCode::UnknownEcosystem, "cannot derive ecosystem from type '" + p.type + "'");

    CanonicalPackage c;
    c.name = p.name;

    const auto version_text = p.version ? p.version : sidecar.version_info;
    if (!version_text) throw Error(ErrorCode::MalformedPurl, "package '" + p.name + "' has no version");
    const bool prefixed = version_text->find(':') != std::string::npos;
    auto [prefix_epoch, bare] = split_epoch(*version_text);
    c.version = std::move(bare);
    c.epoch = prefix_epoch;
    if (const auto* q = p.qualifier("epoch")) {
        const auto qualifier_epoch = parse_uint(*q);
        if (!qualifier_epoch) throw Error(ErrorCode::UnparsableVersion, "epoch qualifier '" + *q + "' is not a number");
        if (prefixed && *qualifier_epoch != prefix_epoch) {
            throw Error(ErrorCode::ConflictingEpoch, "version '" + *version_text + "' conflicts with epoch=" + *q);
        }
        c.epoch = *qualifier_epoch;
    }

    if (const auto* arch = p.qualifier("arch")) {
        c.arch = to_lower(*arch);
    } else if (sidecar.arch) {
        c.arch = to_lower(*sidecar.arch);
    }

    const auto* os_name = p.qualifier("os_name");
    const auto* os_version = p.qualifier("os_version");
    if (os_name && os_version) {
        const auto* os_distro = p.qualifier("os_distro");
        if (const auto os = ecosystem_from_os_name(to_lower(*os_name))) {
            DistroInfo d{*os, *os_version, std::nullopt};
            if (*os == Ecosystem::Debian) d.codename = os_distro ? to_lower(*os_distro) : debian_codename_for(*os_version);
            c.distro = std::move(d);
        } else {
            c.unrecognized_distro = *os_name + "-" + *os_version;
        }
    } else if (const auto* distro = p.qualifier("distro")) {
        auto parsed = parse_distro(*distro, *ecosystem);
        c.distro = std::move(parsed.distro);
        c.unrecognized_distro = std::move(parsed.unrecognized);
    } else if (sidecar.distro) {
        c.distro = sidecar.distro;
    }

    if (sidecar.source_info) {
        if (auto src = parse_source_info(*sidecar.source_info)) {
            c.source_name = std::move(src->first);
            c.source_version = std::move(src->second);
        }
    }
    if (c.source_name.empty()) {
        if (const auto* upstream = p.qualifier("upstream")) {
            std::string_view u = *upstream;
            if (u.ends_with(".src.dpkg")) {
                if (!is_self_referential_upstream(p, u)) {
                    u.remove_suffix(std::string_view(".src.dpkg").size());
                    if (auto parts = split_name_version(u, c.version); parts && plausible_package_name(parts->first)) {
                        c.source_name = std::move(parts->first);
                        c.source_version = std::move(parts->second);
                    }
                }
            } else if (const auto at = u.find('@'); at != std::string_view::npos) {
                if (plausible_package_name(u.substr(0, at)) && at + 1 < u.size()) {
                    c.source_name = std::string(u.substr(0, at));
                    c.source_version = std::string(u.substr(at + 1));
                }
            } else if (plausible_package_name(u)) {
                c.source_name = std::string(u);
                c.source_version = c.full_version();
            }
        }
    }
    if (c.source_name.empty()) {
        c.source_name = c.name;
        // An Alpine origin always shares the version of its subpackages.
        if (*ecosystem == Ecosystem::Alpine) c.source_version = c.full_version();
    }
    return c;
}

} // namespace sbomvert::purl
