#pragma once

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "operator_problem.hpp"
#include "path.hpp"
#include "schedule.hpp"
#include "solver.hpp"

namespace dsm {

// Effective run knobs; names mirror the manifest keys one to one.
struct SolveArgs {
    std::optional<double> r0;
    std::optional<double> g0;
    std::optional<double> c2;
    std::optional<double> kappa; // constants overrides
    std::optional<double> c0;
    std::optional<double> c1;
    std::optional<double> b;
    std::optional<double> eps0;
    std::optional<double> theta;
    std::optional<double> r_target;
    std::optional<double> t_max;
    std::optional<double> stop_residual; // <= 0 disables
    std::optional<double> rel_tol;
    std::optional<double> abs_tol;
    std::optional<double> initial_step;
    std::optional<int> oracle_samples;
    std::optional<std::vector<double>> u0;
    bool force = false;              // proceed despite failing gates
    bool estimate_constants = false; // estimate even when asserted
    std::uint64_t seed = 1;

    nlohmann::json to_json() const;
    static SolveArgs from_json(const nlohmann::json& doc);
};

struct RunPlan {
    ScheduleInputs inputs;
    Schedule schedule;
    GateReport gates;
    Vector u0;
    RegularizedPath coarse_path;
    double g0_measured = 0.0;
    bool g0_floor_applied = false;
    std::string u0_policy; // "zero" | "pulled" | "explicit"
    double r_target = 0.0;
    double t_max = 0.0;
    double stop_residual = 0.0;
    IntegratorConfig integrator;
    nlohmann::json constants; // with provenance
};

// Derives constants (asserted or estimated), measures c2 and g0 from a
// coarse regularized path, derives the schedule and validates the gates.
// When a gate fails and the offending knob was not pinned by the caller,
// the planner remediates (raise r0, or pull u0 toward w_{a(0)}) and retries.
RunPlan plan_run(const OperatorProblem& problem, const SolveArgs& args);

struct SolveOutcome {
    RunPlan plan;
    bool gates_blocked = false; // gates failed and --force was absent
    std::optional<Trajectory> trajectory;
    std::optional<EnvelopeReport> envelope;
    std::optional<MasterInequalityReport> audit;
    nlohmann::json manifest;
    int exit_code = 0;
    std::string trace_csv;
    std::string path_csv_text;
};

// Full pipeline: plan, integrate, check, and (when out_dir is nonempty)
// write trace.csv, path.csv and manifest.json atomically.
SolveOutcome run_solve(const OperatorProblem& problem, const nlohmann::json& descriptor,
                       const SolveArgs& args, const std::string& out_dir);

// Plan-only variant backing the `schedule` command.
nlohmann::json run_schedule(const OperatorProblem& problem, const nlohmann::json& descriptor,
                            const SolveArgs& args);

} // namespace dsm
