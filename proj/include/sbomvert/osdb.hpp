#pragma once

#include "sbomvert/model.hpp"
#include "sbomvert/spdx.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace sbomvert::osdb {

/// One installed package as recorded by the package manager.
struct OsPackage {
    std::string name;
    std::string version;  // distribution format, epoch included
    std::string arch;
    std::string source_name;
    std::string source_version;
    std::string status;  // dpkg status word; "installed" for apk

    friend bool operator==(const OsPackage&, const OsPackage&) = default;
};

/// Stanzas of /var/lib/dpkg/status whose Status marks them installed.
/// Throws Error(MalformedStanza).
std::vector<OsPackage> parse_dpkg_status(std::string_view text);

/// Records of /lib/apk/db/installed. Throws Error(MalformedRecord).
std::vector<OsPackage> parse_apk_installed(std::string_view text);

/// Reads NAME/VERSION_ID/VERSION_CODENAME from an os-release file.
std::optional<DistroInfo> parse_os_release(std::string_view text);

std::vector<CanonicalPackage> to_canonical(const std::vector<OsPackage>& pkgs, const DistroInfo& distro);

/// Ground-truth SBOM: one package per installed binary plus the OS entry.
/// Throws Error(InvalidArgument) for an empty package list.
spdx::SpdxDocument generate_reference_sbom(const std::vector<OsPackage>& pkgs, const DistroInfo& distro);

/// binary name -> (source name, source version); used to repair upstream
/// qualifiers and to tell real binaries from invented source entries.
using SourceMap = std::map<std::string, std::pair<std::string, std::string>, std::less<>>;
SourceMap source_map(const std::vector<OsPackage>& pkgs);

} // namespace sbomvert::osdb
