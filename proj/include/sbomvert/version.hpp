#pragma once

#include "sbomvert/model.hpp"

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sbomvert::version {

struct DebVersion {
    std::uint32_t epoch = 0;
    std::string upstream;
    std::string revision;  // empty when absent
};

/// Splits epoch at the first ':' and revision at the last '-'. Throws
/// Error(UnparsableVersion) on syntax dpkg would reject.
DebVersion parse_debian(std::string_view text);

/// dpkg ordering: epoch, then upstream and revision compared as alternating
/// non-digit / digit runs; '~' sorts before everything, even the end.
std::strong_ordering compare_debian(std::string_view a, std::string_view b);

enum class ApkSuffix : std::int8_t {
    Alpha = -4,
    Beta = -3,
    Pre = -2,
    Rc = -1,
    // 0 is "no suffix"
    Cvs = 1,
    Svn = 2,
    Git = 3,
    Hg = 4,
    P = 5,
};

struct ApkVersion {
    struct Suffix {
        ApkSuffix kind;
        std::uint64_t number = 0;
    };
    std::vector<std::string> components;  // numeric, digits only
    char letter = 0;                      // 0 when absent
    std::vector<Suffix> suffixes;
    std::string hash;                     // "~<hex>" commit tag, not ordered
    std::uint64_t revision = 0;           // -rN
};

ApkVersion parse_alpine(std::string_view text);
std::strong_ordering compare_alpine(std::string_view a, std::string_view b);

std::strong_ordering compare(Ecosystem ecosystem, std::string_view a, std::string_view b);

} // namespace sbomvert::version
