// sbomvert command-line front end.
#include "sbomvert/commands.hpp"
#include "sbomvert/error.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace sbomvert;

namespace {

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path + "'");
    out << content;
}

void write_result(const std::string& path, const std::string& warnings_path, const commands::Output& result) {
    write_output(path, result.content);
    if (!result.warnings) return;
    if (!warnings_path.empty()) {
        write_output(warnings_path, *result.warnings);
    } else if (!path.empty() && path != "-") {
        write_output(path + ".warnings.json", *result.warnings);
    } else {
        std::cerr << *result.warnings;
    }
}

Dialect dialect_arg(const std::string& text) {
    const auto d = dialect_from_string(text);
    if (!d) throw Error(ErrorCode::InvalidArgument, "unknown dialect '" + text + "'");
    return *d;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Translate, scan and compare SPDX SBOMs of Debian and Alpine container images"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "sbomvert 0.1.0");

    std::string input, output, warnings_path, distro, os_release, state_format, target, from, reference_db;
    std::string format = "json", second, dataset = "dataset", tool = "tool";
    std::vector<std::string> debian_trackers, secdbs;
    std::string secdb_release;
    bool exclude_kernel = false, per_source = false, include_unimportant = false;
    std::optional<int> cutoff_year;

    auto* gen = app.add_subcommand("generate", "Reference SBOM from a dpkg status file or apk installed DB");
    gen->add_option("state", input, "dpkg status or apk installed file ('-' for stdin)")->required();
    gen->add_option("--distro", distro, "release, e.g. bookworm, debian:12, alpine:3.19");
    gen->add_option("--os-release", os_release, "os-release file to take the release from");
    gen->add_option("--state-format", state_format, "dpkg or apk (guessed when omitted)")
        ->check(CLI::IsMember({"dpkg", "apk"}));
    gen->add_option("-o,--output", output, "output file (stdout when omitted)");

    auto* conv = app.add_subcommand("convert", "Translate an SBOM for another consumer");
    conv->add_option("sbom", input, "SPDX JSON ('-' for stdin)")->required();
    conv->add_option("-t,--to", target, "target dialect")->required();
    conv->add_option("--from", from, "source dialect (detected when omitted)");
    conv->add_option("--reference-db", reference_db, "dpkg status / apk DB of the same image, for upstream repair");
    conv->add_option("-o,--output", output, "output file (stdout when omitted)");
    conv->add_option("--warnings", warnings_path, "warnings file (default <output>.warnings.json)");

    auto* scan = app.add_subcommand("scan", "Match an SBOM against security tracker snapshots");
    scan->add_option("sbom", input, "SPDX JSON")->required();
    scan->add_option("--debian-tracker", debian_trackers, "Debian security tracker JSON export");
    scan->add_option("--secdb", secdbs, "Alpine secdb file (JSON or YAML)");
    scan->add_option("--secdb-release", secdb_release, "branch for secdb files lacking distroversion");
    scan->add_option("--from", from, "source dialect (detected when omitted)");
    scan->add_option("--reference-db", reference_db, "dpkg status / apk DB of the same image");
    scan->add_flag("--exclude-kernel", exclude_kernel, "drop findings of kernel source packages");
    scan->add_flag("--per-source", per_source, "report each CVE once per source package");
    scan->add_flag("--include-unimportant", include_unimportant, "keep entries the tracker marks unimportant");
    scan->add_option("--cutoff-year", cutoff_year, "ignore CVEs assigned after this year");
    scan->add_option("-f,--format", format, "json or table")->check(CLI::IsMember({"json", "table"}));
    scan->add_option("-o,--output", output, "output file (stdout when omitted)");

    auto* diff = app.add_subcommand("diff", "Jaccard similarity of two SBOMs' packages");
    diff->add_option("a", input, "first SPDX JSON")->required();
    diff->add_option("b", second, "second SPDX JSON")->required();
    diff->add_option("-o,--output", output, "output file (stdout when omitted)");

    auto* ev = app.add_subcommand("eval", "Precision/recall of a scan report against ground truth");
    ev->add_option("report", input, "scan report JSON")->required();
    ev->add_option("truth", second, "truth scan report JSON, or a file of CVE ids")->required();
    ev->add_option("--dataset", dataset, "dataset label for the CSV row");
    ev->add_option("--tool", tool, "tool label for the CSV row");
    ev->add_option("-f,--format", format, "csv, json or table")->check(CLI::IsMember({"csv", "json", "table"}));
    ev->add_option("-o,--output", output, "output file (stdout when omitted)");

    auto* det = app.add_subcommand("detect", "Print the producer dialect of an SBOM");
    det->add_option("sbom", input, "SPDX JSON ('-' for stdin)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        std::optional<osdb::SourceMap> refmap;
        if (!reference_db.empty()) refmap = osdb::source_map(commands::parse_state(commands::read_input(reference_db)));
        const auto* ref = refmap ? &*refmap : nullptr;

        if (*gen) {
            std::optional<DistroInfo> d;
            if (!distro.empty()) d = commands::parse_distro_arg(distro);
            else if (!os_release.empty()) d = osdb::parse_os_release(commands::read_input(os_release));
            if (!d) throw Error(ErrorCode::InvalidArgument, "a distribution is required (--distro or --os-release)");
            std::optional<commands::StateFormat> sf;
            if (state_format == "dpkg") sf = commands::StateFormat::Dpkg;
            if (state_format == "apk") sf = commands::StateFormat::Apk;
            write_result(output, "", commands::generate(commands::read_input(input), *d, sf));
        } else if (*conv) {
            commands::ConvertOptions opts;
            opts.target = dialect_arg(target);
            if (!from.empty()) opts.source = dialect_arg(from);
            opts.reference = ref;
            write_result(output, warnings_path, commands::convert(commands::read_input(input), opts));
        } else if (*scan) {
            if (debian_trackers.empty() && secdbs.empty()) {
                throw Error(ErrorCode::InvalidArgument, "no tracker snapshot given (--debian-tracker or --secdb)");
            }
            std::vector<commands::TrackerFile> files;
            for (const auto& p : debian_trackers) files.push_back({commands::TrackerFile::Kind::Debian, commands::read_input(p), {}});
            for (const auto& p : secdbs) {
                std::optional<std::string> rel;
                if (!secdb_release.empty()) rel = secdb_release;
                files.push_back({commands::TrackerFile::Kind::Secdb, commands::read_input(p), rel});
            }
            const auto db = commands::load_trackers(files);
            commands::ScanRequest req;
            req.options.exclude_kernel = exclude_kernel;
            req.options.mode = per_source ? scanner::DedupeMode::PerSource : scanner::DedupeMode::PerBinary;
            req.options.query.cutoff_year = cutoff_year;
            req.options.query.include_unimportant = include_unimportant;
            if (!from.empty()) req.source = dialect_arg(from);
            req.reference = ref;
            req.format = commands::format_from_string(format);
            write_result(output, "", commands::scan(commands::read_input(input), db, req));
        } else if (*diff) {
            write_result(output, "", commands::diff(commands::read_input(input), commands::read_input(second)));
        } else if (*ev) {
            commands::EvalRequest req{dataset, tool, commands::Format::Csv};
            if (ev->count("--format") > 0) req.format = commands::format_from_string(format);
            write_result(output, "", commands::eval(commands::read_input(input), commands::read_input(second), req));
        } else if (*det) {
            std::cout << commands::detect(commands::read_input(input));
        }
    } catch (const Error& e) {
        std::cerr << "sbomvert: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "sbomvert: internal error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
