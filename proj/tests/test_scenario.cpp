#include "hsmsim/checks.hpp"
#include "hsmsim/error.hpp"
#include "hsmsim/experiments.hpp"
#include "hsmsim/scenario.hpp"
#include "hsmsim/units.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace hsmsim;
namespace fs = std::filesystem;

namespace {

const fs::path canned{HSMSIM_SCENARIO_DIR};

Scenario from_text(const std::string &text) { return parse_scenario(text, "test.ini", canned); }

const char *const minimal = R"(
[scenario]
id = t
experiment = pftp
paths = WAN
[sweep]
variable = transfer.files
values = 1,2
)";

fs::path scratch(const std::string &name) {
    const fs::path p = fs::temp_directory_path() / ("hsmsim_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path &p) {
    std::ifstream in{p, std::ios::binary};
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("unit parsing") {
    using namespace units;
    CHECK(parse_bytes("2GB") == 2e9);
    CHECK(parse_bytes("256KiB") == 262144);
    CHECK(parse_bytes("100kB") == 1e5);
    CHECK(parse_bytes("64MiB") == 67108864);
    CHECK(parse_bytes("4096") == 4096);
    CHECK(parse_rate("80MB/s") == 80e6);
    CHECK(parse_rate("1Gbps") == 125e6);
    CHECK(std::isinf(parse_rate("inf")));
    CHECK(parse_seconds("3.5ms") == doctest::Approx(3.5e-3));
    CHECK(parse_seconds("90s") == 90);
    CHECK(parse_count("6") == 6);
    CHECK(parse_bool("true"));
    CHECK(parse_list(" a, b,,c ") == std::vector<std::string>{"a", "b", "c"});
    CHECK_THROWS_AS((void)parse_bytes("12 parsecs"), ConfigError);
    CHECK_THROWS_AS((void)parse_bytes("-1MB"), ConfigError);
    CHECK_THROWS_AS((void)parse_count("1.5"), ConfigError);
    CHECK_THROWS_AS((void)parse_bool("maybe"), ConfigError);
}

TEST_CASE("every canned scenario loads and validates") {
    const auto suite = load_suite(canned);
    CHECK(suite.size() == 8);
    for (const auto &s : suite) {
        CAPTURE(s.id);
        CHECK_NOTHROW(validate_scenario(s));
        CHECK(s.settings.count("scenario.checks") == 1);
    }
}

TEST_CASE("fig3 sweeps the buffer from 16 KiB to 64 MiB") {
    const auto s = load_scenario(canned / "fig3_netperf.ini");
    CHECK(s.id == "fig3_netperf");
    CHECK(s.sweep_key == "transfer.buffer");
    CHECK(units::parse_bytes(s.sweep_values.front()) == 16384);
    CHECK(units::parse_bytes(s.sweep_values.back()) == 67108864);
    CHECK(s.paths == std::vector<std::string>{"LAN", "WAN"});
}

TEST_CASE("scenario syntax errors name the key") {
    CHECK_THROWS_WITH_AS((void)from_text(std::string{minimal} + "[transfer]\nbogus = 1\n"),
                         doctest::Contains("transfer.bogus"), ConfigError);
    CHECK_THROWS_WITH_AS((void)from_text(std::string{minimal} + "[transfer]\nfiles = lots\n"),
                         doctest::Contains("transfer.files"), ConfigError);
    CHECK_THROWS_AS((void)from_text("[nowhere]\n"), ConfigError);
    CHECK_THROWS_AS((void)from_text("[scenario]\nid = x\nexperiment = pftp\n"), ConfigError);  // no sweep
    CHECK_THROWS_AS((void)from_text("[scenario]\nid = x\nexperiment = pftp\n[sweep]\nvariable = transfer.files\nvalues =\n"),
                    ConfigError);
    CHECK_THROWS_AS((void)from_text(std::string{minimal} + "[scenario]\nid = again\n"), ConfigError);
    CHECK_THROWS_AS((void)load_scenario(canned / "missing.ini"), ConfigError);
}

TEST_CASE("a transfer that references a missing host is rejected with its name") {
    auto s = from_text(std::string{minimal} + "[transfer]\nprotocol = push\n");
    s.experiment = "relay";
    s.settings["scenario.experiment"] = "relay";
    apply_override(s, "dialect.data_host=mover9");
    CHECK_THROWS_WITH_AS(validate_scenario(s), doctest::Contains("mover9"), ScenarioError);
    apply_override(s, "dialect.data_host=mover0");
    apply_override(s, "dialect.pftpd=ghost");
    CHECK_THROWS_WITH_AS(validate_scenario(s), doctest::Contains("ghost"), ScenarioError);
}

TEST_CASE("unknown experiments, paths and check sets are rejected before running") {
    auto s = from_text(minimal);
    s.experiment = "teleport";
    CHECK_THROWS_AS(validate_scenario(s), ConfigError);
    s = from_text(std::string{minimal} + "");
    apply_override(s, "scenario.paths=MOON");
    CHECK_THROWS_WITH_AS(validate_scenario(s), doctest::Contains("MOON"), ScenarioError);
    s = from_text(minimal);
    apply_override(s, "scenario.checks=vibes");
    CHECK_THROWS_AS(validate_scenario(s), ConfigError);
    CHECK_THROWS_AS(apply_override(s, "no equals sign"), ConfigError);
    CHECK_THROWS_AS(apply_override(s, "transfer.nothing=1"), ConfigError);
}

TEST_CASE("duplicate ids in a suite are rejected") {
    const auto a = from_text(minimal);
    CHECK_THROWS_AS(check_unique_ids({a, a}), ConfigError);
    CHECK_THROWS_AS((void)load_suite(canned, "fig3_netperf,fig3_netperf"), ConfigError);
    CHECK_THROWS_AS((void)load_suite(canned, "fig10"), ConfigError);
    CHECK(load_suite(canned, "fig7_tape,fig3_netperf").front().id == "fig7_tape");
}

TEST_CASE("an empty suite writes nothing") {
    const auto dir = scratch("empty");
    const auto grouped = run_suite({}, dir);
    CHECK(grouped.empty());
    CHECK_FALSE(fs::exists(dir));
}

TEST_CASE("CSV files carry the fixed header and one row per point") {
    const auto dir = scratch("csv");
    const auto suite = load_suite(canned, "fig4_streams");
    run_suite(suite, dir);
    const std::string text = slurp(dir / "fig4_streams.csv");
    std::istringstream lines{text};
    std::string first;
    std::getline(lines, first);
    CHECK(first == "scenario,sweep,path,throughput_MBps,makespan_s");
    std::size_t rows = 0;
    for (std::string l; std::getline(lines, l);) {
        CHECK(std::count(l.begin(), l.end(), ',') == 4);
        ++rows;
    }
    CHECK(rows == 2 * 6);
    CHECK(text.find("fig4_streams,4,WAN-100kB,90.000001,") != std::string::npos);
}

TEST_CASE("an unwritable output directory is a configuration error") {
    const auto file = scratch("blocker");
    std::ofstream{file} << "x";
    const auto suite = load_suite(canned, "fig4_streams");
    CHECK_THROWS_AS(run_suite(suite, file / "sub"), ConfigError);
}

TEST_CASE("throughput is recomputable from bytes and makespan") {
    for (const auto &row : run_points_serial(load_suite(canned))) {
        REQUIRE(row.makespan_s > 0);
        CHECK(row.throughput_mbps() == doctest::Approx(row.bytes / row.makespan_s / 1e6));
        double longest = 0;
        for (double e : row.elapsed_s) {
            CHECK(e > 0);
            longest = std::max(longest, e);
        }
        if (row.scenario != "xrsl_stagein") {
            CHECK(longest <= row.makespan_s + 1e-6);
        }
    }
}

TEST_CASE("parallel evaluation equals the serial reference") {
    const auto suite = load_suite(canned);
    const auto serial = run_points_serial(suite);
    for (int jobs : {0, 1, 2, 4, 7}) {
        CAPTURE(jobs);
        CHECK(run_points_parallel(suite, jobs) == serial);
    }
    CHECK(to_csv(run_points_parallel(suite, 3)) == to_csv(serial));
}

TEST_CASE("repetitions must agree, and do") {
    auto s = load_scenario(canned / "fig6_pftp_read.ini");
    apply_override(s, "scenario.repetitions=3");
    const Scenario suite[] = {s};
    CHECK(run_points_serial(suite).size() == 2 * 4 * 5);
}

TEST_CASE("every canned check passes") {
    const auto suite = load_suite(canned);
    const auto rows = run_points_serial(suite);
    const auto points = enumerate_points(suite);
    for (std::size_t i = 0; i < suite.size(); ++i) {
        std::vector<ResultRow> mine;
        for (std::size_t k = 0; k < rows.size(); ++k) {
            if (points[k].scenario == i) {
                mine.push_back(rows[k]);
            }
        }
        const auto outcomes = run_checks(suite[i], mine);
        CHECK_FALSE(outcomes.empty());
        for (const auto &c : outcomes) {
            INFO(c.scenario << " " << c.name << ": " << c.detail);
            CHECK(c.pass);
        }
    }
}

TEST_CASE("a check reports missing series instead of passing") {
    const auto s = load_scenario(canned / "fig9_relay.ini");
    const auto outcomes = run_checks(s, {});
    REQUIRE_FALSE(outcomes.empty());
    for (const auto &c : outcomes) {
        CHECK_FALSE(c.pass);
    }
}
