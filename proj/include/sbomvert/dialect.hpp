#pragma once

#include "sbomvert/model.hpp"
#include "sbomvert/osdb.hpp"
#include "sbomvert/purl.hpp"
#include "sbomvert/spdx.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace sbomvert::dialect {

/// Something lost, guessed or repaired while translating.
struct TranslationWarning {
    purl::IssueCategory category = purl::IssueCategory::IncompleteData;
    std::string code;
    std::string message;
    std::string package;  // empty for document-level warnings

    friend bool operator==(const TranslationWarning&, const TranslationWarning&) = default;
};

nlohmann::ordered_json to_json(const std::vector<TranslationWarning>& warnings);
bool has_warning(const std::vector<TranslationWarning>& warnings, std::string_view code);

struct CanonicalSbom {
    std::optional<DistroInfo> distro;
    std::vector<CanonicalPackage> packages;
    Dialect origin = Dialect::Unknown;
    std::vector<TranslationWarning> lossiness;
    std::optional<std::string> name;
};

/// Creator string stamped on every emitted document.
std::string tool_creator();

/// Creation metadata first, then structural fingerprints.
Dialect detect(const spdx::SpdxDocument& doc);
/// Structural fingerprints only, in this order: dpkg type or uppercase arch
/// (Amazon), os_* qualifiers (Docker), PkgID attribution, epoch qualifier or
/// "debian-N.M" distro (Trivy), "%3A" in a version (Google), "debian-N" or
/// "alpine-N" distro (Anchore), no arch/distro anywhere (Microsoft), every
/// pURL compliant (Reference), else Unknown.
Dialect detect_structural(const spdx::SpdxDocument& doc);

struct NormalizeOptions {
    // Installed-package database of the same image. When present it repairs
    // upstream qualifiers and decides which entries are real binaries.
    const osdb::SourceMap* reference = nullptr;
};

/// Throws Error(NormalizationFailed) when no package has a usable identity.
CanonicalSbom normalize(const spdx::SpdxDocument& doc, Dialect dialect, const NormalizeOptions& opts = {});

struct Emission {
    spdx::SpdxDocument document;
    std::vector<TranslationWarning> warnings;
};

/// Throws Error(InvalidArgument) for Dialect::Unknown.
Emission emit(const CanonicalSbom& sbom, Dialect target);

} // namespace sbomvert::dialect
