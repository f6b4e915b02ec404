#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sbomvert {

enum class ErrorCode {
    MalformedPurl,
    ConflictingEpoch,
    UnknownEcosystem,
    MalformedJson,
    MissingRequiredField,
    DuplicateIdentifier,
    MissingSourceInfo,
    MalformedStanza,
    MalformedRecord,
    NormalizationFailed,
    UnparsableVersion,
    MalformedTrackerData,
    InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Input-level failure. Everything the library rejects because of bad input
/// is reported through this type; the CLI maps it to exit status 1.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace sbomvert
