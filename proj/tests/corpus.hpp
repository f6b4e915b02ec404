#pragma once

#include "sbomvert/dialect.hpp"
#include "sbomvert/osdb.hpp"
#include "support.hpp"

#include <set>

namespace testing {

struct Image {
    std::vector<sbomvert::osdb::OsPackage> installed;
    sbomvert::DistroInfo distro;
    sbomvert::spdx::SpdxDocument reference;
    sbomvert::dialect::CanonicalSbom canonical;
    sbomvert::osdb::SourceMap sources;
};

inline Image load_image(sbomvert::Ecosystem eco) {
    using namespace sbomvert;
    Image img;
    if (eco == Ecosystem::Debian) {
        img.installed = osdb::parse_dpkg_status(fixture("debian/status"));
        img.distro = *osdb::parse_os_release(fixture("debian/os-release"));
    } else {
        img.installed = osdb::parse_apk_installed(fixture("alpine/installed"));
        img.distro = *osdb::parse_os_release(fixture("alpine/os-release"));
    }
    img.reference = osdb::generate_reference_sbom(img.installed, img.distro);
    img.canonical = dialect::normalize(img.reference, Dialect::Reference);
    img.sources = osdb::source_map(img.installed);
    return img;
}

// Package identity with the fields selected by the caller.
struct KeyFields {
    bool arch = true;
    bool source = true;
};

inline std::set<std::string> keys(const sbomvert::dialect::CanonicalSbom& s, KeyFields f = {}) {
    std::set<std::string> out;
    for (const auto& p : s.packages) {
        std::string k = p.name + "|" + p.full_version();
        if (f.arch) k += "|" + p.arch.value_or("-");
        if (f.source) k += "|" + p.source_name + "|" + p.source_version.value_or("-");
        out.insert(k);
    }
    return out;
}

inline sbomvert::spdx::SpdxDocument strip_creation_info(sbomvert::spdx::SpdxDocument doc) {
    doc.creation_info.reset();
    return doc;
}

} // namespace testing
