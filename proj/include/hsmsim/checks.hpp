#pragma once

#include "hsmsim/experiments.hpp"
#include "hsmsim/scenario.hpp"

#include <span>
#include <string>
#include <vector>

namespace hsmsim {

struct CheckOutcome {
    std::string scenario;
    std::string name;
    bool pass = false;
    std::string detail;
};

// Check sets a scenario can name in scenario.checks. Each expects the series
// labels its canned scenario produces and fails when one is missing.
[[nodiscard]] const std::vector<std::string> &known_checks();

[[nodiscard]] std::vector<CheckOutcome> run_checks(const Scenario &s, std::span<const ResultRow> rows);

}  // namespace hsmsim
