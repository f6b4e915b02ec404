#include "sbomvert/osdb.hpp"

#include "sbomvert/dialect.hpp"
#include "sbomvert/error.hpp"

#include <algorithm>
#include <cctype>

namespace sbomvert::osdb {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::ranges::transform(out, out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

// Splits text into lines, tolerating CRLF.
std::vector<std::string_view> lines_of(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        out.push_back(line);
        if (end == text.size()) break;
        start = end + 1;
    }
    return out;
}

struct Stanza {
    std::size_t line = 0;
    std::vector<std::pair<std::string, std::string>> fields;  // lowercased key

    const std::string* get(std::string_view key) const {
        for (const auto& [k, v] : fields) {
            if (k == key) return &v;
        }
        return nullptr;
    }
};

std::vector<Stanza> read_stanzas(std::string_view text) {
    std::vector<Stanza> stanzas;
    Stanza current;
    bool open = false;
    std::size_t n = 0;
    for (auto line : lines_of(text)) {
        ++n;
        if (trim(line).empty()) {
            if (open) stanzas.push_back(std::move(current));
            current = {};
            open = false;
            continue;
        }
        if (line.front() == ' ' || line.front() == '\t') {
            if (!open) throw Error(ErrorCode::MalformedStanza, "line " + std::to_string(n) + ": continuation line before any field");
            // Multi-line values (Description, Conffiles) are not needed.
            continue;
        }
        const auto colon = line.find(':');
        if (colon == std::string_view::npos || colon == 0) {
            throw Error(ErrorCode::MalformedStanza, "line " + std::to_string(n) + ": expected 'Field: value'");
        }
        if (!open) {
            current.line = n;
            open = true;
        }
        current.fields.emplace_back(lower(trim(line.substr(0, colon))), std::string(trim(line.substr(colon + 1))));
    }
    if (open) stanzas.push_back(std::move(current));
    return stanzas;
}

bool installed_status(std::string_view word) {
    return word == "installed" || word == "triggers-pending" || word == "triggers-awaited";
}

} // namespace

std::vector<OsPackage> parse_dpkg_status(std::string_view text) {
    std::vector<OsPackage> out;
    for (const auto& st : read_stanzas(text)) {
        const auto where = "stanza at line " + std::to_string(st.line);
        const auto* name = st.get("package");
        if (!name || name->empty()) throw Error(ErrorCode::MalformedStanza, where + ": missing Package");

        // "want flag status"; a stanza without Status is an available-file
        // style entry and is taken as installed.
        std::string status = "installed";
        if (const auto* s = st.get("status")) {
            const auto last = s->find_last_of(' ');
            status = last == std::string::npos ? *s : s->substr(last + 1);
        }
        if (!installed_status(status)) continue;

        const auto* version = st.get("version");
        if (!version || version->empty()) throw Error(ErrorCode::MalformedStanza, where + " (" + *name + "): missing Version");

        OsPackage p;
        p.name = *name;
        p.version = *version;
        p.status = status;
        if (const auto* arch = st.get("architecture")) p.arch = *arch;
        p.source_name = p.name;
        p.source_version = p.version;
        if (const auto* src = st.get("source"); src && !src->empty()) {
            const std::string_view s = *src;
            const auto paren = s.find('(');
            p.source_name = std::string(trim(s.substr(0, paren)));
            if (paren != std::string_view::npos) {
                const auto close = s.find(')', paren);
                if (close == std::string_view::npos) throw Error(ErrorCode::MalformedStanza, where + ": unterminated Source version");
                p.source_version = std::string(trim(s.substr(paren + 1, close - paren - 1)));
            }
            if (p.source_name.empty()) p.source_name = p.name;
        }
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<OsPackage> parse_apk_installed(std::string_view text) {
    std::vector<OsPackage> out;
    OsPackage current;
    bool open = false;
    std::size_t start = 0, n = 0;
    auto finish = [&] {
        if (!open) return;
        if (current.name.empty() || current.version.empty()) {
            throw Error(ErrorCode::MalformedRecord, "record at line " + std::to_string(start) + ": missing P or V");
        }
        if (current.source_name.empty()) current.source_name = current.name;
        current.source_version = current.version;
        current.status = "installed";
        out.push_back(std::move(current));
        current = {};
        open = false;
    };
    for (auto line : lines_of(text)) {
        ++n;
        if (trim(line).empty()) {
            finish();
            continue;
        }
        if (line.size() < 2 || line[1] != ':') {
            throw Error(ErrorCode::MalformedRecord, "line " + std::to_string(n) + ": expected 'K:value'");
        }
        if (!open) {
            open = true;
            start = n;
        }
        const auto value = std::string(line.substr(2));
        switch (line[0]) {
        case 'P': current.name = value; break;
        case 'V': current.version = value; break;
        case 'A': current.arch = value; break;
        case 'o': current.source_name = value; break;
        default: break;
        }
    }
    finish();
    return out;
}

std::optional<DistroInfo> parse_os_release(std::string_view text) {
    std::string id, version_id, codename;
    for (auto line : lines_of(text)) {
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) continue;
        const auto key = trim(line.substr(0, eq));
        auto value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front()) {
            value = value.substr(1, value.size() - 2);
        }
        if (key == "ID") id = lower(value);
        else if (key == "VERSION_ID") version_id = value;
        else if (key == "VERSION_CODENAME") codename = value;
    }
    const auto eco = ecosystem_from_os_name(id);
    if (!eco) return std::nullopt;
    DistroInfo d{*eco, version_id, std::nullopt};
    if (*eco == Ecosystem::Debian) {
        if (!codename.empty()) d.codename = codename;
        else d.codename = debian_codename_for(version_id);
        if (d.version_id.empty() && d.codename) d.version_id = debian_version_for(*d.codename).value_or("");
    } else if (auto key = d.release_key()) {
        d.version_id = *key;
    }
    return d;
}

std::vector<CanonicalPackage> to_canonical(const std::vector<OsPackage>& pkgs, const DistroInfo& distro) {
    std::vector<CanonicalPackage> out;
    out.reserve(pkgs.size());
    for (const auto& p : pkgs) {
        CanonicalPackage c;
        c.name = p.name;
        std::tie(c.epoch, c.version) = split_epoch(p.version);
        if (!p.arch.empty()) c.arch = lower(p.arch);
        c.source_name = p.source_name.empty() ? p.name : p.source_name;
        c.source_version = p.source_version.empty() ? p.version : p.source_version;
        c.distro = distro;
        out.push_back(std::move(c));
    }
    return out;
}

spdx::SpdxDocument generate_reference_sbom(const std::vector<OsPackage>& pkgs, const DistroInfo& distro) {
    if (pkgs.empty()) throw Error(ErrorCode::InvalidArgument, "no installed packages to describe");
    dialect::CanonicalSbom sbom;
    sbom.distro = distro;
    sbom.origin = Dialect::Reference;
    sbom.packages = to_canonical(pkgs, distro);
    return dialect::emit(sbom, Dialect::Reference).document;
}

SourceMap source_map(const std::vector<OsPackage>& pkgs) {
    SourceMap out;
    for (const auto& p : pkgs) out.emplace(p.name, std::make_pair(p.source_name, p.source_version));
    return out;
}

} // namespace sbomvert::osdb
