#pragma once

#include "hsmsim/scenario.hpp"
#include "hsmsim/topology.hpp"

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace hsmsim {

struct ResultRow {
    std::string scenario;
    std::string sweep;   // numeric sweep value as printed in the CSV
    std::string path;    // series label: LAN, WAN, or path-variant
    double bytes = 0;
    double makespan_s = 0;
    std::vector<double> elapsed_s;  // per transfer

    // bytes / makespan, in MB/s (1e6 bytes)
    [[nodiscard]] double throughput_mbps() const { return bytes / makespan_s / 1e6; }

    friend bool operator==(const ResultRow &, const ResultRow &) = default;
};

// One (scenario, path, variant, sweep value) evaluation.
struct Point {
    std::size_t scenario = 0;
    std::size_t path = 0;
    std::size_t variant = 0;
    std::size_t sweep = 0;
};

[[nodiscard]] Topology build_topology(const Settings &s);

// Points in output order: path, then variant, then sweep value.
[[nodiscard]] std::vector<Point> enumerate_points(std::span<const Scenario> suite);

// Runs one point on its own engine instances.
[[nodiscard]] ResultRow evaluate_point(const Scenario &s, const Point &p);

// Builds every point's configuration without running it; throws the error a
// run would hit (unknown host, path, experiment, protocol...).
void validate_scenario(const Scenario &s);

// Reference implementation: one point after another.
[[nodiscard]] std::vector<ResultRow> run_points_serial(std::span<const Scenario> suite);
// Same result, points distributed over OpenMP threads (jobs <= 0: runtime default).
[[nodiscard]] std::vector<ResultRow> run_points_parallel(std::span<const Scenario> suite, int jobs);

inline constexpr const char *csv_header = "scenario,sweep,path,throughput_MBps,makespan_s";

[[nodiscard]] std::string to_csv(std::span<const ResultRow> rows);

// Writes <out>/<id>.csv per scenario and returns all rows grouped per scenario.
// Throws ConfigError when the directory cannot be created or written.
std::vector<std::vector<ResultRow>> run_suite(std::span<const Scenario> suite, const std::filesystem::path &out_dir,
                                              int jobs = 1);

}  // namespace hsmsim
