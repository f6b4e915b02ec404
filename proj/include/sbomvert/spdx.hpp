#pragma once

#include "sbomvert/model.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sbomvert::spdx {

inline constexpr std::string_view kOperatingSystemPurpose = "OPERATING-SYSTEM";
inline constexpr std::string_view kDocumentId = "SPDXRef-DOCUMENT";

// Fields not modelled explicitly are kept here, keyed by their JSON name,
// and written back unchanged.
using Extras = nlohmann::json;

struct ExternalRef {
    std::string category;
    std::string type;
    std::string locator;
    Extras extras = Extras::object();

    friend bool operator==(const ExternalRef&, const ExternalRef&) = default;
};

struct SpdxPackage {
    std::string spdx_id;
    std::string name;
    std::optional<std::string> version_info;
    std::optional<std::string> download_location;
    std::optional<std::string> source_info;
    std::optional<std::string> primary_package_purpose;
    std::vector<ExternalRef> external_refs;
    std::vector<std::string> attribution_texts;
    Extras extras = Extras::object();

    /// First external ref of type "purl", in document order.
    [[nodiscard]] const ExternalRef* purl_ref() const;
    [[nodiscard]] bool is_operating_system() const;

    friend bool operator==(const SpdxPackage&, const SpdxPackage&) = default;
};

struct SpdxFile {
    std::string spdx_id;
    std::string file_name;
    Extras extras = Extras::object();

    friend bool operator==(const SpdxFile&, const SpdxFile&) = default;
};

struct SpdxRelationship {
    std::string element;
    std::string type;
    std::string related;
    Extras extras = Extras::object();

    friend bool operator==(const SpdxRelationship&, const SpdxRelationship&) = default;
};

struct CreationInfo {
    std::vector<std::string> creators;
    std::optional<std::string> created;
    std::optional<std::string> comment;
    Extras extras = Extras::object();

    friend bool operator==(const CreationInfo&, const CreationInfo&) = default;
};

struct SpdxDocument {
    std::optional<std::string> spdx_version;
    std::optional<std::string> data_license;
    std::string spdx_id{kDocumentId};
    std::optional<std::string> name;
    std::optional<std::string> document_namespace;
    std::optional<CreationInfo> creation_info;
    std::vector<SpdxPackage> packages;
    std::vector<SpdxFile> files;
    std::vector<SpdxRelationship> relationships;
    Extras extras = Extras::object();

    [[nodiscard]] const SpdxPackage* find_package(std::string_view spdx_id) const;

    friend bool operator==(const SpdxDocument&, const SpdxDocument&) = default;
};

/// Parses SPDX 2.x JSON. Throws Error(MalformedJson), Error(MissingRequiredField)
/// (including relationships naming unknown elements) or
/// Error(DuplicateIdentifier).
SpdxDocument parse(std::string_view text);

/// Deterministic JSON: modelled fields in a fixed order, extras after them
/// sorted by key, two-space indentation, trailing newline.
std::string serialize(const SpdxDocument& doc);

/// The package identity a consumer of the given dialect actually matches on.
struct IdentityFields {
    std::string package;
    std::string source;
    std::uint32_t epoch = 0;
    std::string version;  // epoch-free
    std::optional<std::string> distro;
    std::optional<std::string> os_name;
    std::optional<std::string> os_version;
    std::optional<std::string> arch;

    friend bool operator==(const IdentityFields&, const IdentityFields&) = default;
};

/// Throws Error(MissingSourceInfo) for a Trivy package without sourceInfo and
/// Error(MissingRequiredField) when another dialect's package has no pURL.
IdentityFields package_identifier_view(const SpdxPackage& p, Dialect dialect);

} // namespace sbomvert::spdx
