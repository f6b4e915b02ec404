#include "sbomvert/metrics.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace sbomvert;
using metrics::round2;

namespace {

scanner::Finding finding(std::string name, std::string source, std::string cve) {
    scanner::Finding f;
    f.package.name = std::move(name);
    f.package.version = "1";
    f.package.source_name = std::move(source);
    f.package.source_version = "1";
    f.cve_id = std::move(cve);
    return f;
}

scanner::VulnReport report(std::vector<scanner::Finding> fs) {
    scanner::VulnReport r;
    r.findings = std::move(fs);
    std::ranges::sort(r.findings);
    return r;
}

} // namespace

TEST_CASE("jaccard") {
    CHECK(metrics::jaccard({}, {}) == 1.0);
    CHECK(metrics::jaccard({"a"}, {}) == 0.0);
    CHECK(metrics::jaccard({"a", "b"}, {"b", "c"}) == doctest::Approx(1.0 / 3));
    CHECK(metrics::jaccard({"a", "b"}, {"a", "b"}) == 1.0);
}

TEST_CASE("precision, recall and F1 from counts") {
    const auto m = metrics::from_counts(6, 197, 2495);
    CHECK(round2(m.precision) == doctest::Approx(0.03));
    CHECK(round2(m.recall) == doctest::Approx(0.00));
    CHECK(round2(m.f1) == doctest::Approx(0.00));
    CHECK(metrics::csv_row("bookworm", "grype", m) == "bookworm,grype,6,197,2495,0.03,0.00,0.00");

    const auto zero = metrics::from_counts(0, 0, 0);
    CHECK(zero.precision == 0);
    CHECK(zero.recall == 0);
    CHECK(zero.f1 == 0);

    const auto perfect = metrics::compare_to_truth({"a", "b"}, {"a", "b"});
    CHECK(perfect.f1 == 1.0);
    const auto half = metrics::compare_to_truth({"a", "x"}, {"a", "b"});
    CHECK(half.tp == 1);
    CHECK(half.fp == 1);
    CHECK(half.fn == 1);
    CHECK(half.f1 == doctest::Approx(0.5));
}

TEST_CASE("round2 is half-up") {
    CHECK(round2(0.125) == doctest::Approx(0.13));
    CHECK(round2(0.0296) == doctest::Approx(0.03));
    CHECK(round2(0.004) == doctest::Approx(0.00));
    CHECK(round2(0.005) == doctest::Approx(0.01));
}

TEST_CASE("duplication statistics over CVE-set groups") {
    // Groups of sizes 4, 3, 2 and 1: mean 2.5, sample sd sqrt(5/3), se = sd / 2.
    std::vector<scanner::Finding> fs;
    auto add_group = [&](int size, const std::string& cve) {
        for (int i = 0; i < size; ++i) fs.push_back(finding(cve + "-bin" + std::to_string(i), cve, cve));
    };
    add_group(4, "CVE-2020-1");
    add_group(3, "CVE-2020-2");
    add_group(2, "CVE-2020-3");
    add_group(1, "CVE-2020-4");
    const auto d = metrics::duplication_stats(report(fs));
    CHECK(d.groups == 4);
    CHECK(d.packages == 10);
    CHECK(d.mean == doctest::Approx(2.5));
    CHECK(d.stderr_ == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
    CHECK(d.stderr_ == doctest::Approx(0.6455).epsilon(1e-4));

    const auto single = metrics::duplication_stats(report({finding("a", "a", "CVE-2020-1")}));
    CHECK(single.groups == 1);
    CHECK(single.stderr_ == 0);
    CHECK(metrics::duplication_stats(report({})).groups == 0);
}

TEST_CASE("CVE breakdown: two binaries of one source") {
    const auto b = metrics::cve_breakdown(report({finding("login", "shadow", "CVE-2023-29383"),
                                                  finding("passwd", "shadow", "CVE-2023-29383")}));
    CHECK(b.source_only == 1);
    CHECK(b.duplicated_same_source == 1);
    CHECK(b.shared_across_sources == 0);
    CHECK(b.pct_source_only() == doctest::Approx(50.0));
    CHECK(b.pct_duplicated_same_source() == doctest::Approx(50.0));
}

TEST_CASE("CVE breakdown: three sources enumerated by hand") {
    // CVE-A under glibc (libc6, libc-bin) and eglibc (libc6-compat): no
    // glibc binary is named like its source, so libc-bin (first by name)
    // represents it. Both representatives are shared, libc6 is a duplicate.
    // CVE-B only under openssl: openssl is source-only, libssl3 a duplicate.
    // CVE-C: zlib1g is source-only.
    const auto b = metrics::cve_breakdown(report({
        finding("libc6", "glibc", "CVE-A"),
        finding("libc-bin", "glibc", "CVE-A"),
        finding("libc6-compat", "eglibc", "CVE-A"),
        finding("openssl", "openssl", "CVE-B"),
        finding("libssl3", "openssl", "CVE-B"),
        finding("zlib1g", "zlib", "CVE-C"),
    }));
    CHECK(b.shared_across_sources == 2);
    CHECK(b.duplicated_same_source == 2);
    CHECK(b.source_only == 2);
    CHECK(b.total() == 6);
    CHECK(b.pct_shared_across_sources() + b.pct_source_only() + b.pct_duplicated_same_source() ==
          doctest::Approx(100.0));
}

TEST_CASE("empty breakdown has zero percentages") {
    const metrics::CveBreakdown b;
    CHECK(b.total() == 0);
    CHECK(b.pct_source_only() == 0);
}
