// phaselab — configuration-driven geometric-phase scenario runner.
//
// Exit codes: 0 success, 1 physics-contract failure (flagged rows or a
// deviation beyond the configured bound), 2 config error, 3 I/O error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "phaselab/phaselab.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream ifs(path, std::ios::binary);
    if (!ifs) throw phaselab::io_error("cannot open '" + path + "'", path);
    std::ostringstream ss;
    ss << ifs.rdbuf();
    return ss.str();
}

int run_command(const std::string& config_path, std::string format, std::string out,
                std::optional<std::uint64_t> seed, int jobs) {
    std::string text;
    try {
        text = read_file(config_path);
    } catch (const phaselab::io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    phaselab::ParseResult parsed = phaselab::parse_config(text);
    if (!parsed.ok()) {
        std::cerr << "config error(s) in " << config_path << ":\n";
        for (const auto& m : parsed.errors) std::cerr << "  - " << m << "\n";
        return 2;
    }
    phaselab::ScenarioConfig cfg = *parsed.config;
    if (seed) cfg.seed = *seed;
    if (out.empty()) out = cfg.out;

    phaselab::RunReport report;
    try {
        report = phaselab::run_scenario(cfg, jobs);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (out.empty()) {
            phaselab::emit_report(report, format, std::cout);
        } else {
            phaselab::save_report(report, format, out);
            std::cerr << "report written to " << out << "\n";
        }
    } catch (const phaselab::io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }

    if (report.any_failed()) {
        std::cerr << "one or more rows failed; see the notes column\n";
        return 1;
    }
    if (cfg.max_deviation && report.max_reported_deviation() > *cfg.max_deviation) {
        std::cerr << "max deviation " << report.max_reported_deviation()
                  << " exceeds the configured bound " << *cfg.max_deviation << "\n";
        return 1;
    }
    return 0;
}

int validate_command(const std::string& config_path) {
    std::string text;
    try {
        text = read_file(config_path);
    } catch (const phaselab::io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    phaselab::ParseResult parsed = phaselab::parse_config(text);
    if (!parsed.ok()) {
        std::cerr << "config error(s) in " << config_path << ":\n";
        for (const auto& m : parsed.errors) std::cerr << "  - " << m << "\n";
        return 2;
    }
    std::cout << config_path << ": valid (" << parsed.config->kind_name << ", scenario \""
              << parsed.config->scenario << "\")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    phaselab::verify_dispatch_table();

    CLI::App app{"phaselab: geometric-phase scenarios for finite quantum systems"};
    app.require_subcommand(1);

    std::string config_path, format = "csv", out;
    std::optional<std::uint64_t> seed;
    int jobs = 1;

    CLI::App* run = app.add_subcommand("run", "run a scenario config and emit a report");
    run->add_option("config", config_path, "scenario config file (JSON, schema v1)")
        ->required();
    run->add_option("--format", format, "report format")
        ->check(CLI::IsMember({"csv", "json"}));
    run->add_option("--out", out, "output path (default: config's \"out\", else stdout)");
    run->add_option("--seed", seed, "override the config's random seed");
    run->add_option("--jobs", jobs, "concurrent row workers")->check(CLI::Range(1, 256));

    CLI::App* validate = app.add_subcommand("validate", "validate a scenario config");
    validate->add_option("config", config_path, "scenario config file")->required();

    CLI::App* list = app.add_subcommand("list-scenarios", "list scenario kinds");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return run_command(config_path, format, out, seed, jobs);
    if (validate->parsed()) return validate_command(config_path);
    if (list->parsed()) {
        for (const auto& k : phaselab::scenario_kinds())
            std::cout << k.name << "\n    " << k.description << "\n";
        return 0;
    }
    return 0;
}
