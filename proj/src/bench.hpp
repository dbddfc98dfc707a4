#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "operator_problem.hpp"
#include "runner.hpp"

namespace dsm {

struct BenchRow {
    std::string method;
    bool converged = false;
    double final_error = std::numeric_limits<double>::quiet_NaN(); // dist to y
    double final_residual = 0.0;                                   // ||F(u) - f||
    long linear_solves = 0;
    std::string note;
};

struct BenchReport {
    std::vector<BenchRow> rows;
    std::string table; // plain-text rendering
    nlohmann::json to_json() const;
};

// Runs the flow and the requested baselines (newton-plain, fixed-a,
// geometric-a) on the same problem; outcomes are recorded, not asserted.
BenchReport run_bench(const OperatorProblem& problem, const std::vector<std::string>& baselines,
                      const SolveArgs& args);

} // namespace dsm
