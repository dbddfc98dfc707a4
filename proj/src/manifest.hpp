#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "comparison.hpp"
#include "path.hpp"
#include "schedule.hpp"
#include "solver.hpp"

namespace dsm {

std::string tool_version();

// Writes content to path via a temporary file in the same directory plus
// rename, so partially written files are never observed.
void write_file_atomic(const std::string& path, const std::string& content);

// Trajectory trace with the fixed header
// t,r,residual,envelope,dist_to_w,dist_to_y (empty cells where a column was
// not measured). Formatting is %.17g, so identical runs are byte-identical.
std::string trajectory_csv(const Trajectory& trajectory);

// Path trace: abs_a,residual,newton_iters,dist_to_limit,dist_to_y.
std::string path_csv(const RegularizedPath& path, const OperatorProblem& problem);

// Phi trace in the trajectory style: t,phi.
std::string phi_csv(const PhiTrajectory& phi);

nlohmann::json schedule_json(const Schedule& schedule);
nlohmann::json gates_json(const GateReport& gates);
nlohmann::json envelope_json(const EnvelopeReport& report);
nlohmann::json audit_json(const MasterInequalityReport& report);
nlohmann::json certificate_json(const Certificate& certificate);
nlohmann::json trajectory_metrics_json(const Trajectory& trajectory);

} // namespace dsm
