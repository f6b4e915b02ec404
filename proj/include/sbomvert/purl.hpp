#pragma once

#include "sbomvert/model.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sbomvert::purl {

/// Structured Package URL: pkg:type/namespace/name@version?qualifiers#subpath.
/// Components are held decoded; percent-encoding only exists in text form.
struct PackageUrl {
    std::string type;
    std::optional<std::string> ns;  // '/'-joined decoded segments
    std::string name;
    std::optional<std::string> version;
    std::map<std::string, std::string> qualifiers;
    std::optional<std::string> subpath;

    [[nodiscard]] const std::string* qualifier(const std::string& key) const;

    friend bool operator==(const PackageUrl&, const PackageUrl&) = default;
};

/// Parses pURL text. Throws Error(MalformedPurl).
PackageUrl parse(std::string_view text);

struct SerializeOptions {
    // Emit ':' inside the version as "%3A" (the Google dialect).
    bool encode_version_colon = false;
};

/// Canonical text: lowercase type, reserved characters percent-encoded,
/// qualifiers ordered by key, ':' in the version kept literal.
std::string serialize(const PackageUrl& p, SerializeOptions opts = {});

std::string percent_encode(std::string_view text, std::string_view keep = {});
/// Throws Error(MalformedPurl) on a truncated or non-hex escape.
std::string percent_decode(std::string_view text);

enum class IssueCategory { InvalidFormat, IncompleteData, IncorrectInformation, FormatReliance };

std::string_view to_string(IssueCategory c) noexcept;

struct ComplianceIssue {
    IssueCategory category;
    std::string code;
    std::string message;
    std::string field;

    friend bool operator==(const ComplianceIssue&, const ComplianceIssue&) = default;
};

/// Structural compliance checks on a parsed pURL. Never throws.
std::vector<ComplianceIssue> validate(const PackageUrl& p, Ecosystem ecosystem);

/// validate() plus checks only visible in the text form (unencoded name
/// characters, an encoded epoch separator). Unparseable text yields a single
/// InvalidFormat issue.
std::vector<ComplianceIssue> validate_text(std::string_view text, Ecosystem ecosystem);

bool has_issue(const std::vector<ComplianceIssue>& issues, std::string_view code);

/// Values a pURL may not carry by itself but that a dialect stores in other
/// SPDX package fields.
struct PackageSidecar {
    std::optional<std::string> version_info;
    std::optional<std::string> source_info;
    std::optional<std::string> arch;
    std::optional<DistroInfo> distro;
};

/// Result of mapping a distro qualifier onto a release.
struct DistroParse {
    std::optional<DistroInfo> distro;
    std::optional<std::string> unrecognized;
};

/// Understands "bookworm", "debian-12", "debian-12.11", "3.19", "alpine-3.19.1".
DistroParse parse_distro(std::string_view value, Ecosystem ecosystem);

/// Ecosystem implied by type/namespace ("deb", "dpkg", "apk").
std::optional<Ecosystem> ecosystem_of(const PackageUrl& p);

/// "built package from: <name> <version>" -> (name, version).
std::optional<std::pair<std::string, std::string>> parse_source_info(std::string_view text);
std::string format_source_info(std::string_view source_name, std::string_view source_version);

/// Throws Error(ConflictingEpoch) when the version prefix and the epoch
/// qualifier disagree, Error(UnknownEcosystem) when neither the pURL nor
/// the sidecar fixes the ecosystem.
CanonicalPackage to_canonical(const PackageUrl& p, const PackageSidecar& sidecar = {});

} // namespace sbomvert::purl
