#include "sbomvert/model.hpp"

#include "sbomvert/error.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <utility>

namespace sbomvert {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::MalformedPurl: return "MalformedPurl";
    case ErrorCode::ConflictingEpoch: return "ConflictingEpoch";
    case ErrorCode::UnknownEcosystem: return "UnknownEcosystem";
    case ErrorCode::MalformedJson: return "MalformedJson";
    case ErrorCode::MissingRequiredField: return "MissingRequiredField";
    case ErrorCode::DuplicateIdentifier: return "DuplicateIdentifier";
    case ErrorCode::MissingSourceInfo: return "MissingSourceInfo";
    case ErrorCode::MalformedStanza: return "MalformedStanza";
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::NormalizationFailed: return "NormalizationFailed";
    case ErrorCode::UnparsableVersion: return "UnparsableVersion";
    case ErrorCode::MalformedTrackerData: return "MalformedTrackerData";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

std::string_view to_string(Ecosystem e) noexcept {
    return e == Ecosystem::Debian ? "debian" : "alpine";
}

std::string_view to_string(Dialect d) noexcept {
    switch (d) {
    case Dialect::Amazon: return "amazon";
    case Dialect::Anchore: return "anchore";
    case Dialect::Docker: return "docker";
    case Dialect::Google: return "google";
    case Dialect::Microsoft: return "microsoft";
    case Dialect::Trivy: return "trivy";
    case Dialect::Reference: return "reference";
    case Dialect::Unknown: return "unknown";
    }
    return "unknown";
}

std::optional<Dialect> dialect_from_string(std::string_view text) {
    std::string lower(text);
    std::ranges::transform(lower, lower.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    static constexpr std::array<std::pair<std::string_view, Dialect>, 11> kNames{{
        {"amazon", Dialect::Amazon},
        {"anchore", Dialect::Anchore},
        {"syft", Dialect::Anchore},
        {"docker", Dialect::Docker},
        {"scout", Dialect::Docker},
        {"google", Dialect::Google},
        {"gcloud", Dialect::Google},
        {"microsoft", Dialect::Microsoft},
        {"trivy", Dialect::Trivy},
        {"reference", Dialect::Reference},
        {"unknown", Dialect::Unknown},
    }};
    for (const auto& [name, dialect] : kNames) {
        if (lower == name) return dialect;
    }
    return std::nullopt;
}

std::optional<Ecosystem> ecosystem_from_os_name(std::string_view os_name) {
    if (os_name == "debian") return Ecosystem::Debian;
    if (os_name == "alpine") return Ecosystem::Alpine;
    return std::nullopt;
}

namespace {

constexpr std::array<std::pair<std::string_view, std::string_view>, 19> kDebianReleases{{
    {"1.1", "buzz"},    {"1.2", "rex"},       {"1.3", "bo"},      {"2.0", "hamm"},
    {"2.1", "slink"},   {"2.2", "potato"},    {"3.0", "woody"},   {"3.1", "sarge"},
    {"4", "etch"},      {"5", "lenny"},       {"6", "squeeze"},   {"7", "wheezy"},
    {"8", "jessie"},    {"9", "stretch"},     {"10", "buster"},   {"11", "bullseye"},
    {"12", "bookworm"}, {"13", "trixie"},     {"14", "forky"},
}};

} // namespace

std::optional<std::string> debian_codename_for(std::string_view version_id) {
    for (const auto& [version, codename] : kDebianReleases) {
        if (version == version_id) return std::string(codename);
    }
    // Point releases: "12.11" -> "12"; etch was also published as "4.0".
    const auto dot = version_id.find('.');
    if (dot != std::string_view::npos) {
        const auto major = version_id.substr(0, dot);
        for (const auto& [version, codename] : kDebianReleases) {
            if (version == major) return std::string(codename);
        }
    }
    if (version_id == "15") return std::string("duke");
    return std::nullopt;
}

std::optional<std::string> debian_version_for(std::string_view codename) {
    for (const auto& [version, name] : kDebianReleases) {
        if (name == codename) return std::string(version);
    }
    if (codename == "duke") return std::string("15");
    return std::nullopt;
}

std::optional<std::string> DistroInfo::release_key() const {
    if (os == Ecosystem::Debian) {
        if (codename) return codename;
        return debian_codename_for(version_id);
    }
    if (version_id.empty()) return std::nullopt;
    if (version_id == "edge") return version_id;
    // Alpine branches are major.minor.
    const auto first = version_id.find('.');
    if (first == std::string::npos) return version_id;
    const auto second = version_id.find('.', first + 1);
    return version_id.substr(0, second);
}

std::pair<std::uint32_t, std::string> split_epoch(std::string_view full_version) {
    const auto colon = full_version.find(':');
    if (colon == std::string_view::npos) return {0, std::string(full_version)};
    const auto digits = full_version.substr(0, colon);
    std::uint32_t epoch = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), epoch);
    if (digits.empty() || ec != std::errc{} || ptr != digits.data() + digits.size()) {
        throw Error(ErrorCode::UnparsableVersion, "invalid epoch in '" + std::string(full_version) + "'");
    }
    return {epoch, std::string(full_version.substr(colon + 1))};
}

std::string join_epoch(std::uint32_t epoch, std::string_view version) {
    if (epoch == 0) return std::string(version);
    return std::to_string(epoch) + ":" + std::string(version);
}

std::string CanonicalPackage::full_version() const { return join_epoch(epoch, version); }

std::string CanonicalPackage::upstream_version() const {
    const auto dash = version.rfind('-');
    return dash == std::string::npos ? version : version.substr(0, dash);
}

std::string CanonicalPackage::revision() const {
    const auto dash = version.rfind('-');
    return dash == std::string::npos ? std::string() : version.substr(dash + 1);
}

std::string CanonicalPackage::identity_key() const {
    return source_name + "|" + name + "|" + std::to_string(epoch) + "|" + version + "|" + arch.value_or("");
}

} // namespace sbomvert
