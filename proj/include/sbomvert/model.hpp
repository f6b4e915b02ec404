#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sbomvert {

enum class Ecosystem { Debian, Alpine };

/// SBOM producer whose conventions a document follows.
enum class Dialect { Amazon, Anchore, Docker, Google, Microsoft, Trivy, Reference, Unknown };

inline constexpr Dialect kEmittableDialects[] = {
    Dialect::Amazon, Dialect::Anchore, Dialect::Docker,   Dialect::Google,
    Dialect::Microsoft, Dialect::Trivy, Dialect::Reference,
};

std::string_view to_string(Ecosystem e) noexcept;
std::string_view to_string(Dialect d) noexcept;
std::optional<Dialect> dialect_from_string(std::string_view text);
std::optional<Ecosystem> ecosystem_from_os_name(std::string_view os_name);

/// Operating system release an SBOM or package belongs to.
struct DistroInfo {
    Ecosystem os = Ecosystem::Debian;
    std::string version_id;               // "12", "3.19"
    std::optional<std::string> codename;  // "bookworm"; never set for Alpine

    [[nodiscard]] std::string os_name() const { return std::string(to_string(os)); }
    /// Key used by the security trackers: the codename for Debian, the
    /// major.minor branch for Alpine.
    [[nodiscard]] std::optional<std::string> release_key() const;

    friend bool operator==(const DistroInfo&, const DistroInfo&) = default;
};

/// Debian release codename for a version id ("12" -> "bookworm"). Accepts
/// point releases ("12.11").
std::optional<std::string> debian_codename_for(std::string_view version_id);
std::optional<std::string> debian_version_for(std::string_view codename);

/// Tool-independent package record every dialect is normalized into.
struct CanonicalPackage {
    std::string name;
    std::uint32_t epoch = 0;
    std::string version;  // without epoch: upstream[-revision]
    std::optional<std::string> arch;
    std::string source_name;
    std::optional<std::string> source_version;  // full form, epoch included
    bool is_source_synthetic = false;

    std::optional<DistroInfo> distro;
    // Distro qualifier text that could not be mapped onto DistroInfo.
    std::optional<std::string> unrecognized_distro;

    /// "epoch:version" when epoch > 0, otherwise the bare version.
    [[nodiscard]] std::string full_version() const;
    [[nodiscard]] std::string upstream_version() const;
    [[nodiscard]] std::string revision() const;
    /// (source, name, epoch, version, arch) tuple rendered as one string.
    [[nodiscard]] std::string identity_key() const;
};

/// Splits "E:V" into (E, V). Throws Error(UnparsableVersion) for a
/// non-numeric epoch.
std::pair<std::uint32_t, std::string> split_epoch(std::string_view full_version);
std::string join_epoch(std::uint32_t epoch, std::string_view version);

} // namespace sbomvert
