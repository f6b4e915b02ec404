// One line per acceptance criterion. Exit status is the number of failures.

#include "corpus.hpp"
#include "sbomvert/commands.hpp"
#include "sbomvert/error.hpp"
#include "sbomvert/metrics.hpp"
#include "sbomvert/scanner.hpp"
#include "sbomvert/tracker.hpp"
#include "sbomvert/version.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>

using namespace sbomvert;

namespace {

struct Check {
    std::vector<std::string> failures;
    std::string detail;

    void expect(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
};

int run(int number, const char* title, double budget_s, const std::function<void(Check&)>& body) {
    Check c;
    const auto start = std::chrono::steady_clock::now();
    try {
        body(c);
    } catch (const std::exception& e) {
        c.failures.push_back(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (budget_s > 0 && secs > budget_s) c.failures.push_back("took " + std::to_string(secs) + " s");
    std::printf("%s %d %s (%.3f s)%s%s\n", c.failures.empty() ? "PASS" : "FAIL", number, title, secs,
                c.detail.empty() ? "" : ": ", c.detail.c_str());
    for (const auto& f : c.failures) std::printf("    %s\n", f.c_str());
    std::fflush(stdout);
    return c.failures.empty() ? 0 : 1;
}

bool any_category(const std::vector<dialect::TranslationWarning>& ws, purl::IssueCategory cat) {
    return std::ranges::any_of(ws, [&](auto& w) { return w.category == cat; });
}

void table3(Check& c) {
    const char* tools[] = {"amazon", "anchore", "google", "microsoft", "docker", "trivy", "reference"};
    for (const char* tool : tools) {
        const auto doc = spdx::parse(testing::fixture(std::string("magics/") + tool + ".spdx.json"));
        const auto sbom = dialect::normalize(doc, dialect::detect(doc));
        const std::string t = tool;
        c.expect(sbom.packages.size() == 1, t + ": expected one package");
        if (sbom.packages.size() != 1) continue;
        const auto& p = sbom.packages[0];
        c.expect(p.name == "python3-magics++" && p.epoch == 2 && p.version == "1.5.8-1",
                 t + ": got " + p.name + " " + p.full_version());
        if (t == "microsoft") {
            c.expect(any_category(sbom.lossiness, purl::IssueCategory::IncompleteData), "microsoft: no IncompleteData");
        }
        if (t == "amazon") {
            c.expect(any_category(sbom.lossiness, purl::IssueCategory::IncorrectInformation),
                     "amazon: no IncorrectInformation");
            c.expect(any_category(sbom.lossiness, purl::IssueCategory::InvalidFormat), "amazon: no InvalidFormat");
        }
    }
    c.detail = "7 representations agree on python3-magics++ 2:1.5.8-1";
}

void round_trip(Check& c) {
    const auto img = testing::load_image(Ecosystem::Debian);
    const auto db = tracker::load_debian_tracker(testing::fixture("debian/tracker.json"));
    const auto want = scanner::scan(img.canonical, db).distinct_cves();
    c.expect(img.installed.size() == 25, "reference fixture is not 25 packages");
    const auto ref_text = spdx::serialize(img.reference);

    int pairs = 0;
    int flagged = 0;
    for (auto s : kEmittableDialects) {
        auto src_doc = spdx::parse(commands::convert(ref_text, {.target = s}).content);
        if (s == Dialect::Microsoft) {
            // The real tool writes neither the OS entry nor sourceInfo.
            std::erase_if(src_doc.packages, [](auto& p) { return p.is_operating_system(); });
            src_doc.relationships.clear();
            for (auto& p : src_doc.packages) p.source_info.reset();
        }
        const auto src_text = spdx::serialize(src_doc);
        for (auto t : kEmittableDialects) {
            ++pairs;
            const std::string label = std::string(to_string(s)) + "->" + std::string(to_string(t));
            const auto converted = commands::convert(src_text, {.target = t, .source = s});
            const auto report = commands::scan_report(converted.content, db, {});
            const auto got = report.distinct_cves();
            if (got == want) continue;
            if (s == Dialect::Microsoft) {
                const bool distro_loss_flagged = converted.warnings &&
                                                 converted.warnings->find("distro-missing") != std::string::npos &&
                                                 dialect::has_warning(report.warnings, "lossy-scan");
                c.expect(distro_loss_flagged, label + ": CVE set differs and the distro loss is not flagged");
                if (distro_loss_flagged) ++flagged;
                continue;
            }
            c.expect(false, label + ": " + std::to_string(got.size()) + " CVEs, expected " + std::to_string(want.size()));
        }
    }
    c.detail = std::to_string(pairs) + " ordered pairs, " + std::to_string(want.size()) + " CVEs each; " +
               std::to_string(flagged) + " Microsoft-source pairs lose the distro and say so";
}

void consumer_requirements(Check& c) {
    const auto img = testing::load_image(Ecosystem::Debian);
    const auto trivy = dialect::emit(img.canonical, Dialect::Trivy).document;
    const std::vector<std::string> want_attr{"Class: os-pkgs", "Type: debian"};
    const auto marked = std::ranges::count_if(trivy.packages, [&](const spdx::SpdxPackage& p) {
        return p.attribution_texts == want_attr && p.primary_package_purpose == "OPERATING-SYSTEM";
    });
    c.expect(marked == 1, "trivy: " + std::to_string(marked) + " os-pkgs marker packages");
    const auto docker = dialect::emit(img.canonical, Dialect::Docker).document;
    const auto with_purpose =
        std::ranges::count_if(docker.packages, [](auto& p) { return p.primary_package_purpose.has_value(); });
    c.expect(static_cast<std::size_t>(with_purpose) == docker.packages.size(),
             "docker: purpose on " + std::to_string(with_purpose) + "/" + std::to_string(docker.packages.size()));
    c.detail = "trivy os marker x" + std::to_string(marked) + ", docker purpose " + std::to_string(with_purpose) + "/" +
               std::to_string(docker.packages.size());
}

std::strong_ordering rel(const std::string& r) {
    return r == "<" ? std::strong_ordering::less : r == ">" ? std::strong_ordering::greater : std::strong_ordering::equal;
}

void versions(Check& c) {
    const auto deb = testing::tsv(testing::oracle("debian_versions.tsv"));
    const auto apk = testing::tsv(testing::oracle("alpine_versions.tsv"));
    c.expect(deb.size() >= 30, "fewer than 30 Debian pairs");
    c.expect(apk.size() >= 20, "fewer than 20 Alpine pairs");
    for (const auto& r : deb) {
        c.expect(version::compare_debian(r[0], r[2]) == rel(r[1]), "debian " + r[0] + " " + r[1] + " " + r[2]);
    }
    for (const auto& r : apk) {
        c.expect(version::compare_alpine(r[0], r[2]) == rel(r[1]), "alpine " + r[0] + " " + r[1] + " " + r[2]);
    }

    std::mt19937 rng(4242);
    auto gen_deb = [&] {
        static const std::string chars = "0123456789ab.+~";
        std::string v = rng() % 3 == 0 ? std::to_string(rng() % 3) + ":" : "";
        v += std::to_string(rng() % 10);
        for (int i = static_cast<int>(rng() % 6); i > 0; --i) v += chars[rng() % chars.size()];
        if (rng() % 2) v += "-" + std::to_string(rng() % 5) + (rng() % 2 ? "~deb12u1" : "");
        return v;
    };
    auto gen_apk = [&] {
        static const char* sfx[] = {"", "_alpha", "_rc1", "_p2", "_git"};
        std::string v = std::to_string(rng() % 4) + "." + std::to_string(rng() % 12);
        if (rng() % 3 == 0) v += static_cast<char>('a' + rng() % 3);
        v += sfx[rng() % 5];
        if (rng() % 2) v += "-r" + std::to_string(rng() % 4);
        return v;
    };
    int violations = 0;
    auto axioms = [&](auto gen, auto cmp) {
        std::vector<std::string> vs(10000);
        for (auto& v : vs) v = gen();
        for (std::size_t i = 0; i + 2 < vs.size(); ++i) {
            const auto &a = vs[i], &b = vs[i + 1], &x = vs[i + 2];
            if (cmp(a, a) != 0) ++violations;
            if (cmp(a, b) != (0 <=> cmp(b, a))) ++violations;
            if (cmp(a, b) <= 0 && cmp(b, x) <= 0 && cmp(a, x) > 0) ++violations;
        }
    };
    axioms(gen_deb, version::compare_debian);
    axioms(gen_apk, version::compare_alpine);
    c.expect(violations == 0, std::to_string(violations) + " order axiom violations");
    c.detail = std::to_string(deb.size()) + " Debian and " + std::to_string(apk.size()) +
               " Alpine oracle pairs, 2 x 10000 generated versions";
}

bool finds(const scanner::VulnReport& r, std::string_view pkg, std::string_view cve) {
    return std::ranges::any_of(r.findings, [&](auto& f) { return f.package.name == pkg && f.cve_id == cve; });
}

void tracker_semantics(Check& c) {
    const auto deb = testing::load_image(Ecosystem::Debian);
    const auto db = tracker::load_debian_tracker(testing::fixture("debian/tracker.json"));
    auto bullseye = deb.canonical;
    bullseye.distro = DistroInfo{Ecosystem::Debian, "11", "bullseye"};
    for (auto& p : bullseye.packages) p.distro = bullseye.distro;
    const auto on_bookworm = scanner::scan(deb.canonical, db);
    const auto on_bullseye = scanner::scan(bullseye, db);
    c.expect(finds(on_bullseye, "login", "CVE-2023-29383"), "bullseye: shadow CVE-2023-29383 missing");
    c.expect(!finds(on_bookworm, "login", "CVE-2023-29383"), "bookworm: shadow CVE-2023-29383 reported");

    const auto alp = testing::load_image(Ecosystem::Alpine);
    const auto secdb = tracker::load_alpine_secdb(testing::fixture("alpine/secdb-v3.20-main.yaml"));
    const auto on_alpine = scanner::scan(alp.canonical, secdb);
    c.expect(!finds(on_alpine, "wget", "CVE-2024-10524"), "alpine 3.20: wget CVE-2024-10524 reported");
    c.expect(finds(on_bookworm, "wget", "CVE-2024-10524"), "debian: wget CVE-2024-10524 missing");
    c.detail = "CVE-2023-29383 bullseye only; CVE-2024-10524 debian only";
}

void metrics_reproduction(Check& c) {
    const auto m = metrics::from_counts(6, 197, 2495);
    const auto row = metrics::csv_row("debian-all", "microsoft", m);
    c.expect(row == "debian-all,microsoft,6,197,2495,0.03,0.00,0.00", "csv row " + row);
    c.expect(metrics::jaccard({"a", "b"}, {"a", "b"}) == 1.0, "identical jaccard");
    c.expect(metrics::jaccard({"a"}, {"b"}) == 0.0, "disjoint jaccard");

    scanner::VulnReport unique;
    for (int i = 0; i < 5; ++i) {
        scanner::Finding f;
        f.package.name = "pkg" + std::to_string(i);
        f.package.source_name = f.package.name;
        f.cve_id = "CVE-2024-" + std::to_string(1000 + i);
        unique.findings.push_back(f);
    }
    const auto d = metrics::duplication_stats(unique);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f (%.2f)", metrics::round2(d.mean), metrics::round2(d.stderr_));
    c.expect(std::string(buf) == "1.00 (0.00)", std::string("duplication ") + buf);
    c.detail = row + "; duplication " + buf;
}

void ground_truth(Check& c) {
    const auto deb = testing::load_image(Ecosystem::Debian);
    const auto alp = testing::load_image(Ecosystem::Alpine);
    c.expect(deb.installed.size() == 25, "dpkg count " + std::to_string(deb.installed.size()));
    c.expect(alp.installed.size() == 17, "apk count " + std::to_string(alp.installed.size()));
    std::size_t purls = 0;
    for (const auto* img : {&deb, &alp}) {
        for (const auto& p : img->reference.packages) {
            if (p.is_operating_system()) continue;
            ++purls;
            const auto* ref = p.purl_ref();
            c.expect(ref != nullptr, p.name + ": no pURL");
            if (!ref) continue;
            const auto issues = purl::validate_text(ref->locator, img->distro.os);
            c.expect(issues.empty(), ref->locator + ": " + (issues.empty() ? "" : issues[0].code));
        }
    }
    const auto scout = spdx::parse(testing::fixture("dialects/docker-login-shadow.spdx.json"));
    const auto inflated = std::ranges::count_if(scout.packages, [](auto& p) { return !p.is_operating_system(); });
    const auto deflated = dialect::normalize(scout, Dialect::Docker).packages.size();
    c.expect(deflated == 2, "login/shadow normalized to " + std::to_string(deflated) + " packages");
    c.detail = "dpkg 25, apk 17, " + std::to_string(purls) + " clean pURLs, login/shadow " + std::to_string(inflated) +
               " -> " + std::to_string(deflated);
}

void determinism(Check& c) {
    const auto status = testing::fixture("debian/status");
    const auto distro = commands::parse_distro_arg("debian:12");
    const auto db = tracker::load_debian_tracker(testing::fixture("debian/tracker.json"));
    int outputs = 0;
    const auto ref1 = commands::generate(status, distro).content;
    const auto ref2 = commands::generate(status, distro).content;
    c.expect(ref1 == ref2, "generate differs");
    for (auto t : kEmittableDialects) {
        const auto a = commands::convert(ref1, {.target = t});
        const auto b = commands::convert(ref2, {.target = t});
        c.expect(a.content == b.content && a.warnings == b.warnings,
                 std::string("convert to ") + std::string(to_string(t)) + " differs");
        for (auto f : {commands::Format::Json, commands::Format::Table}) {
            commands::ScanRequest req;
            req.format = f;
            c.expect(commands::scan(a.content, db, req).content == commands::scan(b.content, db, req).content,
                     std::string("scan of ") + std::string(to_string(t)) + " differs");
            ++outputs;
        }
        ++outputs;
    }
    c.detail = std::to_string(outputs) + " outputs compared byte for byte";
}

} // namespace

int main() {
    int failed = 0;
    failed += run(1, "identifier-convergence", 1.0, table3);
    failed += run(2, "dialect-round-trip", 10.0, round_trip);
    failed += run(3, "consumer-requirements", 0, consumer_requirements);
    failed += run(4, "version-oracle", 5.0, versions);
    failed += run(5, "tracker-semantics", 0, tracker_semantics);
    failed += run(6, "metrics-reproduction", 0, metrics_reproduction);
    failed += run(7, "ground-truth-generation", 0, ground_truth);
    failed += run(8, "determinism", 0, determinism);
    return failed;
}
