#include "sbomvert/version.hpp"

#include "sbomvert/error.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>

namespace sbomvert::version {

namespace {

[[noreturn]] void unparsable(std::string_view text, std::string_view why) {
    throw Error(ErrorCode::UnparsableVersion, "'" + std::string(text) + "': " + std::string(why));
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

// Weight of a character inside a non-digit run.
int order(char c) {
    if (is_digit(c)) return 0;
    if (is_alpha(c)) return c;
    if (c == '~') return -1;
    if (c) return c + 256;
    return 0;
}

// Port of dpkg's verrevcmp().
int verrevcmp(std::string_view a, std::string_view b) {
    std::size_t i = 0;
    std::size_t j = 0;
    auto at = [](std::string_view s, std::size_t k) { return k < s.size() ? s[k] : '\0'; };
    while (i < a.size() || j < b.size()) {
        int first_diff = 0;
        while ((i < a.size() && !is_digit(a[i])) || (j < b.size() && !is_digit(b[j]))) {
            const int ac = order(at(a, i));
            const int bc = order(at(b, j));
            if (ac != bc) return ac - bc;
            ++i;
            ++j;
        }
        while (at(a, i) == '0') ++i;
        while (at(b, j) == '0') ++j;
        while (is_digit(at(a, i)) && is_digit(at(b, j))) {
            if (!first_diff) first_diff = at(a, i) - at(b, j);
            ++i;
            ++j;
        }
        if (is_digit(at(a, i))) return 1;
        if (is_digit(at(b, j))) return -1;
        if (first_diff) return first_diff;
    }
    return 0;
}

std::strong_ordering sign(int v) {
    if (v < 0) return std::strong_ordering::less;
    if (v > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

} // namespace

DebVersion parse_debian(std::string_view text) {
    std::string_view s = text;
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    if (s.empty()) unparsable(text, "empty version");

    DebVersion v;
    if (const auto colon = s.find(':'); colon != std::string_view::npos) {
        const auto digits = s.substr(0, colon);
        const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v.epoch);
        if (digits.empty() || ec != std::errc{} || ptr != digits.data() + digits.size()) {
            unparsable(text, "epoch is not a number");
        }
        s = s.substr(colon + 1);
    }
    if (const auto dash = s.rfind('-'); dash != std::string_view::npos) {
        v.revision = std::string(s.substr(dash + 1));
        s = s.substr(0, dash);
        if (v.revision.empty()) unparsable(text, "empty revision");
    }
    v.upstream = std::string(s);
    if (v.upstream.empty()) unparsable(text, "empty upstream version");
    if (!is_digit(v.upstream.front())) unparsable(text, "version does not start with a digit");
    const auto upstream_ok = std::ranges::all_of(v.upstream, [](char c) {
        return is_digit(c) || is_alpha(c) || c == '.' || c == '+' || c == '-' || c == '~' || c == ':';
    });
    if (!upstream_ok) unparsable(text, "invalid character in upstream version");
    const auto revision_ok = std::ranges::all_of(
        v.revision, [](char c) { return is_digit(c) || is_alpha(c) || c == '.' || c == '+' || c == '~'; });
    if (!revision_ok) unparsable(text, "invalid character in revision");
    return v;
}

std::strong_ordering compare_debian(std::string_view a, std::string_view b) {
    const auto va = parse_debian(a);
    const auto vb = parse_debian(b);
    if (va.epoch != vb.epoch) return va.epoch <=> vb.epoch;
    if (const int r = verrevcmp(va.upstream, vb.upstream)) return sign(r);
    return sign(verrevcmp(va.revision, vb.revision));
}

namespace {

struct SuffixName {
    std::string_view text;
    ApkSuffix kind;
};

// Longest names first so "pre" is not read as "p".
constexpr std::array<SuffixName, 9> kSuffixes{{
    {"alpha", ApkSuffix::Alpha},
    {"beta", ApkSuffix::Beta},
    {"pre", ApkSuffix::Pre},
    {"cvs", ApkSuffix::Cvs},
    {"svn", ApkSuffix::Svn},
    {"git", ApkSuffix::Git},
    {"rc", ApkSuffix::Rc},
    {"hg", ApkSuffix::Hg},
    {"p", ApkSuffix::P},
}};

std::uint64_t parse_number(std::string_view digits, std::string_view text) {
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (ec != std::errc{} || ptr != digits.data() + digits.size()) unparsable(text, "number out of range");
    return value;
}

std::size_t digit_run(std::string_view s, std::size_t pos) {
    auto end = pos;
    while (end < s.size() && is_digit(s[end])) ++end;
    return end;
}

// Numeric components; one with a leading zero (after the first) compares as
// a decimal fraction, like apk and portage.
int compare_component(const std::string& a, const std::string& b, bool first) {
    if (!first && (a.starts_with('0') || b.starts_with('0'))) {
        auto strip = [](std::string s) {
            while (s.size() > 1 && s.back() == '0') s.pop_back();
            return s;
        };
        const auto sa = strip(a);
        const auto sb = strip(b);
        return sa < sb ? -1 : (sa > sb ? 1 : 0);
    }
    const auto ta = a.find_first_not_of('0') == std::string::npos ? std::string("0") : a.substr(a.find_first_not_of('0'));
    const auto tb = b.find_first_not_of('0') == std::string::npos ? std::string("0") : b.substr(b.find_first_not_of('0'));
    if (ta.size() != tb.size()) return ta.size() < tb.size() ? -1 : 1;
    return ta < tb ? -1 : (ta > tb ? 1 : 0);
}

} // namespace

ApkVersion parse_alpine(std::string_view text) {
    ApkVersion v;
    std::size_t pos = 0;
    const auto n = text.size();

    while (true) {
        const auto end = digit_run(text, pos);
        if (end == pos) unparsable(text, "expected a numeric component");
        v.components.emplace_back(text.substr(pos, end - pos));
        pos = end;
        if (pos < n && text[pos] == '.' && pos + 1 < n && is_digit(text[pos + 1])) {
            ++pos;
            continue;
        }
        break;
    }
    if (pos < n && text[pos] >= 'a' && text[pos] <= 'z') v.letter = text[pos++];

    while (pos < n && text[pos] == '_') {
        ++pos;
        const auto rest = text.substr(pos);
        const auto it = std::ranges::find_if(kSuffixes, [&](const SuffixName& s) { return rest.starts_with(s.text); });
        if (it == kSuffixes.end()) unparsable(text, "unknown suffix");
        pos += it->text.size();
        const auto end = digit_run(text, pos);
        v.suffixes.push_back({it->kind, end > pos ? parse_number(text.substr(pos, end - pos), text) : 0});
        pos = end;
    }

    if (pos < n && text[pos] == '~') {
        auto end = pos + 1;
        while (end < n && std::isxdigit(static_cast<unsigned char>(text[end]))) ++end;
        if (end == pos + 1) unparsable(text, "empty commit hash");
        v.hash = std::string(text.substr(pos + 1, end - pos - 1));
        pos = end;
    }

    if (pos < n && text.substr(pos).starts_with("-r")) {
        pos += 2;
        const auto end = digit_run(text, pos);
        if (end == pos) unparsable(text, "revision without number");
        v.revision = parse_number(text.substr(pos, end - pos), text);
        pos = end;
    }
    if (pos != n) unparsable(text, "trailing characters");
    return v;
}

std::strong_ordering compare_alpine(std::string_view a, std::string_view b) {
    const auto va = parse_alpine(a);
    const auto vb = parse_alpine(b);

    const auto common = std::min(va.components.size(), vb.components.size());
    for (std::size_t i = 0; i < common; ++i) {
        if (const int r = compare_component(va.components[i], vb.components[i], i == 0)) return sign(r);
    }
    if (va.components.size() != vb.components.size()) return va.components.size() <=> vb.components.size();
    if (va.letter != vb.letter) return va.letter <=> vb.letter;

    const auto suffixes = std::max(va.suffixes.size(), vb.suffixes.size());
    for (std::size_t i = 0; i < suffixes; ++i) {
        // A missing suffix sits between pre-releases and post-releases.
        const auto ka = i < va.suffixes.size() ? static_cast<int>(va.suffixes[i].kind) : 0;
        const auto kb = i < vb.suffixes.size() ? static_cast<int>(vb.suffixes[i].kind) : 0;
        if (ka != kb) return ka <=> kb;
        const auto na = va.suffixes[i].number;
        const auto nb = vb.suffixes[i].number;
        if (na != nb) return na <=> nb;
    }
    return va.revision <=> vb.revision;
}

std::strong_ordering compare(Ecosystem ecosystem, std::string_view a, std::string_view b) {
    return ecosystem == Ecosystem::Debian ? compare_debian(a, b) : compare_alpine(a, b);
}

} // namespace sbomvert::version
