#include "sbomvert/commands.hpp"
#include "sbomvert/error.hpp"
#include "support.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <algorithm>

using namespace sbomvert;
using nlohmann::json;

namespace {

std::string debian_reference() {
    return commands::generate(testing::fixture("debian/status"), commands::parse_distro_arg("debian:12")).content;
}

commands::ScanRequest default_scan() { return {}; }

} // namespace

TEST_CASE("distro arguments") {
    CHECK(commands::parse_distro_arg("debian:12").codename == "bookworm");
    CHECK(commands::parse_distro_arg("bookworm").version_id == "12");
    CHECK(commands::parse_distro_arg("alpine-3.19").version_id == "3.19");
    CHECK(commands::parse_distro_arg("alpine:3.20.3").version_id == "3.20");
    CHECK_THROWS_AS(commands::parse_distro_arg("plan9"), Error);
}

TEST_CASE("state format sniffing") {
    CHECK(commands::sniff_state_format(testing::fixture("debian/status")) == commands::StateFormat::Dpkg);
    CHECK(commands::sniff_state_format(testing::fixture("alpine/installed")) == commands::StateFormat::Apk);
}

TEST_CASE("generate is byte-stable") {
    CHECK(debian_reference() == debian_reference());
    const auto doc = spdx::parse(debian_reference());
    CHECK(doc.packages.size() == 26);
    const auto alpine = commands::generate(testing::fixture("alpine/installed"), commands::parse_distro_arg("alpine:3.20"));
    CHECK(spdx::parse(alpine.content).packages.size() == 18);
}

TEST_CASE("convert writes the target and a warnings sidecar") {
    const auto out = commands::convert(debian_reference(), {.target = Dialect::Microsoft});
    CHECK(commands::detect(out.content) == "microsoft\n");
    REQUIRE(out.warnings);
    const auto w = json::parse(*out.warnings);
    CHECK(w.at("source_dialect") == "reference");
    CHECK(w.at("target_dialect") == "microsoft");
    CHECK(w.at("emission").dump().find("arch-dropped") != std::string::npos);

    const auto again = commands::convert(debian_reference(), {.target = Dialect::Microsoft});
    CHECK(again.content == out.content);
    CHECK(again.warnings == out.warnings);

    const auto forced = commands::convert(testing::fixture("magics/trivy.spdx.json"),
                                          {.target = Dialect::Reference, .source = Dialect::Trivy});
    CHECK(json::parse(*forced.warnings).at("source_dialect") == "trivy");
}

TEST_CASE("convert rejects bad input with typed errors") {
    auto code = [](std::string_view text) {
        try {
            (void)commands::convert(text, {});
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::InvalidArgument;
    };
    CHECK(code("") == ErrorCode::MalformedJson);
    CHECK(code("not json") == ErrorCode::MalformedJson);
    CHECK(code(R"({"packages":[{"SPDXID":"SPDXRef-x","name":"x"}]})") == ErrorCode::NormalizationFailed);
}

TEST_CASE("scan report round-trips through JSON") {
    auto db = commands::load_trackers({{commands::TrackerFile::Kind::Debian, testing::fixture("debian/tracker.json"), {}}});
    const auto text = debian_reference();
    const auto report = commands::scan_report(text, db, default_scan());
    const auto out = commands::scan(text, db, default_scan());
    const auto back = commands::report_from_json(out.content);
    CHECK(back.findings == report.findings);
    CHECK(scanner::to_json(back).dump() == scanner::to_json(report).dump());

    auto table_req = default_scan();
    table_req.format = commands::Format::Table;
    CHECK(commands::scan(text, db, table_req).content == scanner::to_table(report));
}

TEST_CASE("diff: identical content, different dialect") {
    const auto ref = debian_reference();
    const auto trivy = commands::convert(ref, {.target = Dialect::Trivy}).content;
    const auto j = json::parse(commands::diff(ref, trivy).content);
    CHECK(j.at("jaccard") == 1.0);
    CHECK(j.at("raw_purl_jaccard").get<double>() < 1.0);
    CHECK(j.at("only_in_a").empty());
    CHECK(j.at("dialect_b") == "trivy");
}

TEST_CASE("diff: representations of one binary are one package") {
    const char* tools[] = {"amazon", "anchore", "google", "microsoft", "docker", "trivy", "reference"};
    for (const char* a : tools) {
        const auto a_text = testing::fixture(std::string("magics/") + a + ".spdx.json");
        CHECK(json::parse(commands::diff(a_text, a_text).content).at("raw_purl_jaccard") == 1.0);
        for (const char* b : tools) {
            if (std::string_view(a) == b) continue;
            INFO(a << " vs " << b);
            const auto j = json::parse(commands::diff(a_text, testing::fixture(std::string("magics/") + b + ".spdx.json")).content);
            CHECK(j.at("jaccard") == 1.0);
            CHECK(j.at("raw_purl_jaccard") == 0.0);
        }
    }
    const auto j = json::parse(commands::diff(testing::fixture("magics/microsoft.spdx.json"),
                                              testing::fixture("magics/trivy.spdx.json"))
                                   .content);
    REQUIRE(j.at("field_deltas").size() == 1);
    CHECK(j.at("field_deltas")[0].at("fields").contains("arch"));
}

TEST_CASE("convert: consumer-facing examples") {
    const auto ms = commands::convert(testing::fixture("magics/microsoft.spdx.json"), {.target = Dialect::Trivy});
    CHECK(ms.warnings->find("distro-missing") != std::string::npos);
    const auto scout = spdx::parse(commands::convert(testing::fixture("magics/trivy.spdx.json"), {.target = Dialect::Docker}).content);
    CHECK(std::ranges::all_of(scout.packages, [](auto& p) { return p.primary_package_purpose.has_value(); }));
    const auto ref = testing::fixture("magics/reference.spdx.json");
    const auto same = commands::convert(ref, {.target = Dialect::Reference}).content;
    CHECK(json::parse(commands::diff(ref, same).content).at("raw_purl_jaccard") == 1.0);
}

TEST_CASE("scan: empty SBOM gives an empty report") {
    auto db = commands::load_trackers({{commands::TrackerFile::Kind::Debian, testing::fixture("debian/tracker.json"), {}}});
    const auto r = commands::scan_report(R"({"SPDXID":"SPDXRef-DOCUMENT","packages":[]})", db, {});
    CHECK(r.findings.empty());
}

TEST_CASE("eval against a truth list") {
    auto db = commands::load_trackers({{commands::TrackerFile::Kind::Debian, testing::fixture("debian/tracker.json"), {}}});
    const auto report = commands::scan(debian_reference(), db, default_scan()).content;
    const auto truth = "# ground truth\nCVE-2023-50868\nCVE-2099-0001 CVE-2099-0002\n";
    const auto csv = commands::eval(report, truth, {.dataset = "bookworm", .tool = "sbomvert"}).content;
    CHECK(csv.starts_with("dataset,tool,true_pos,false_pos,false_neg,precision,recall,f1\nbookworm,sbomvert,1,13,2,"));
    const auto j = json::parse(commands::eval(report, report, {.format = commands::Format::Json}).content);
    CHECK(j.at("metrics").at("f1") == 1.0);
    CHECK(j.contains("duplication"));
    CHECK_THROWS_AS(commands::eval(report, "not-a-cve\n", {}), Error);
}
