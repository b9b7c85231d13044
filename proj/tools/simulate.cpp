// simulate: run storage-access scenarios and write one CSV per scenario.
//
// Exit codes: 0 ok, 1 a --check assertion failed, 2 configuration error.

#include "hsmsim/checks.hpp"
#include "hsmsim/error.hpp"
#include "hsmsim/experiments.hpp"
#include "hsmsim/scenario.hpp"
#include "hsmsim/xrsl.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#ifndef HSMSIM_SCENARIO_DIR
#define HSMSIM_SCENARIO_DIR "scenarios"
#endif

namespace {

constexpr int exit_ok = 0;
constexpr int exit_check_failed = 1;
constexpr int exit_config = 2;

int run(int argc, char **argv) {
    CLI::App app{"Discrete-event simulator of LAN/WAN access to a hierarchical storage system"};
    std::vector<std::string> scenario_files;
    std::string suite;
    std::string scenario_dir = HSMSIM_SCENARIO_DIR;
    std::string out_dir;
    std::vector<std::string> overrides;
    bool check = false;
    bool list = false;
    int jobs = 1;

    app.add_option("--scenario", scenario_files, "Scenario file to run (repeatable)");
    app.add_option("--suite", suite, "'all' or comma-separated scenario ids from --scenario-dir");
    app.add_option("--scenario-dir", scenario_dir, "Directory holding canned *.ini scenarios")->capture_default_str();
    app.add_option("--out", out_dir, "Directory for <scenario>.csv output");
    app.add_option("--set", overrides, "section.key=value override applied to every scenario (repeatable)");
    app.add_option("--jobs", jobs, "Parallel scenario points (0: one per core)")->capture_default_str();
    app.add_flag("--check", check, "Evaluate each scenario's built-in assertions; exit 1 on violation");
    app.add_flag("--list", list, "List canned scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    try {
        if (list) {
            for (const auto &s : hsmsim::load_suite(scenario_dir)) {
                std::cout << s.id << "\t" << s.experiment << "\t" << s.description << "\n";
            }
            return exit_ok;
        }
        if (scenario_files.empty() && suite.empty()) {
            std::cerr << "simulate: nothing to run (use --scenario, --suite or --list)\n";
            return exit_config;
        }
        if (out_dir.empty()) {
            std::cerr << "simulate: --out is required\n";
            return exit_config;
        }

        std::vector<hsmsim::Scenario> scenarios;
        if (!suite.empty()) {
            scenarios = hsmsim::load_suite(scenario_dir, suite);
        }
        for (const auto &f : scenario_files) {
            scenarios.push_back(hsmsim::load_scenario(f));
        }
        hsmsim::check_unique_ids(scenarios);
        for (auto &s : scenarios) {
            for (const auto &o : overrides) {
                hsmsim::apply_override(s, o);
            }
            hsmsim::validate_scenario(s);
        }
        if (scenarios.empty()) {
            std::cerr << "simulate: warning: suite is empty, nothing written\n";
            return exit_ok;
        }

        const auto grouped = hsmsim::run_suite(scenarios, out_dir, jobs);
        std::cout << "wrote " << scenarios.size() << " CSV file(s) to " << out_dir << "\n";
        if (!check) {
            return exit_ok;
        }
        bool all_pass = true;
        for (std::size_t i = 0; i < scenarios.size(); ++i) {
            for (const auto &c : hsmsim::run_checks(scenarios[i], grouped[i])) {
                std::cout << (c.pass ? "PASS " : "FAIL ") << c.scenario << " " << c.name << ": " << c.detail << "\n";
                all_pass = all_pass && c.pass;
            }
        }
        return all_pass ? exit_ok : exit_check_failed;
    } catch (const hsmsim::ConfigError &e) {
        std::cerr << "simulate: configuration error: " << e.what() << "\n";
    } catch (const hsmsim::ScenarioError &e) {
        std::cerr << "simulate: scenario error: " << e.what() << "\n";
    } catch (const hsmsim::xrsl::ParseError &e) {
        std::cerr << "simulate: " << e.what() << "\n";
    } catch (const std::exception &e) {
        std::cerr << "simulate: error: " << e.what() << "\n";
    }
    return exit_config;
}

}  // namespace

int main(int argc, char **argv) { return run(argc, argv); }
