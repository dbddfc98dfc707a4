#include "bench.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "errors.hpp"
#include "linalg.hpp"
#include "path.hpp"
#include "solver.hpp"

namespace dsm {

using nlohmann::json;

json BenchReport::to_json() const {
    json rows_json = json::array();
    for (const BenchRow& r : rows) {
        json item{{"method", r.method},
                  {"converged", r.converged},
                  {"final_residual", r.final_residual},
                  {"linear_solves", r.linear_solves},
                  {"note", r.note}};
        if (std::isfinite(r.final_error)) item["final_error"] = r.final_error;
        rows_json.push_back(item);
    }
    return json{{"rows", rows_json}};
}

namespace {

double error_to_y(const OperatorProblem& prob, const Vector& u) {
    if (!prob.known_solution()) return std::numeric_limits<double>::quiet_NaN();
    return prob.norm(Vector(u - *prob.known_solution()));
}

double plain_residual(const OperatorProblem& prob, const Vector& u) {
    return prob.norm(Vector(prob.eval_apply(u) - prob.rhs()));
}

BenchRow bench_dsm(const OperatorProblem& prob, const SolveArgs& args) {
    BenchRow row;
    row.method = "dsm";
    RunPlan plan = plan_run(prob, args);
    IntegratorConfig cfg = plan.integrator;
    cfg.oracle_samples = 0;
    cfg.audit_triplets = false;
    cfg.stop_residual = 0.0; // run to the horizon for a comparable endpoint
    Trajectory traj = dsm_solve(prob, plan.schedule, plan.u0, cfg, false);
    row.converged =
        traj.status == SolveStatus::Converged || traj.status == SolveStatus::HorizonReached;
    row.final_error = error_to_y(prob, traj.u_final);
    row.final_residual = plain_residual(prob, traj.u_final);
    row.linear_solves = traj.resolvent_solves;
    if (!plan.gates.all_pass) row.note = "gates failed";
    return row;
}

// Undamped-tolerance Newton directly on F(u) = f; the linearization may be
// singular, which is the expected failure mode on ill-posed problems.
BenchRow bench_newton_plain(const OperatorProblem& prob) {
    BenchRow row;
    row.method = "newton-plain";
    const Vector& f = prob.rhs();
    const double tol = 1e-8 * (1.0 + prob.norm(f));
    Vector u = Vector::Zero(prob.dimension());
    try {
        for (int iter = 0; iter < 100; ++iter) {
            Vector g = prob.eval_apply(u) - f;
            row.final_residual = prob.norm(g);
            if (row.final_residual <= tol) {
                row.converged = true;
                break;
            }
            Vector step = solve_shifted(prob.jacobian_matrix(u), 0.0, Vector(-g));
            ++row.linear_solves;
            if (!step.allFinite() || step.norm() > 1e12) {
                row.note = "diverged (unbounded Newton step)";
                break;
            }
            u += step;
        }
        if (!row.converged && row.note.empty()) row.note = "stagnated within the solve budget";
    } catch (const ResolventSingularError& e) {
        row.note = std::string("singular linearization: ") + e.what();
    } catch (const Error& e) {
        row.note = e.what();
    }
    row.final_error = error_to_y(prob, u);
    if (row.note.empty() && !row.converged) row.note = "budget exhausted";
    return row;
}

BenchRow bench_fixed_a(const OperatorProblem& prob, const SolveArgs& args) {
    BenchRow row;
    row.method = "fixed-a";
    const double a = args.r_target.value_or(1e-3);
    try {
        RegularizedSolve sol = solve_regularized(prob, a, Vector::Zero(prob.dimension()));
        row.converged = true;
        row.linear_solves = std::max(sol.iters, 1);
        row.final_error = error_to_y(prob, sol.w);
        row.final_residual = plain_residual(prob, sol.w);
        std::ostringstream note;
        note << "single solve at a = " << a;
        row.note = note.str();
    } catch (const Error& e) {
        row.note = e.what();
    }
    return row;
}

BenchRow bench_geometric_a(const OperatorProblem& prob, const SolveArgs& args) {
    BenchRow row;
    row.method = "geometric-a";
    const double r0 = args.r0.value_or(1.0);
    const double floor = args.r_target.value_or(1e-6);
    RegularizedPath path = track_path(prob, default_path_moduli(r0, floor),
                                      Vector::Zero(prob.dimension()));
    for (const PathEntry& e : path.entries) row.linear_solves += std::max(e.newton_iters, 1);
    row.converged = !path.aborted && !path.entries.empty();
    if (!path.entries.empty()) {
        const Vector& w = path.entries.back().w;
        row.final_error = error_to_y(prob, w);
        row.final_residual = plain_residual(prob, w);
    }
    if (path.aborted) row.note = path.abort_reason;
    return row;
}

} // namespace

BenchReport run_bench(const OperatorProblem& prob, const std::vector<std::string>& baselines,
                      const SolveArgs& args) {
    for (const std::string& b : baselines)
        if (b != "newton-plain" && b != "fixed-a" && b != "geometric-a")
            throw UsageError("unknown baseline '" + b +
                             "' (newton-plain, fixed-a, geometric-a)");

    BenchReport report;
    report.rows.push_back(bench_dsm(prob, args));
    for (const std::string& b : baselines) {
        if (b == "newton-plain") report.rows.push_back(bench_newton_plain(prob));
        if (b == "fixed-a") report.rows.push_back(bench_fixed_a(prob, args));
        if (b == "geometric-a") report.rows.push_back(bench_geometric_a(prob, args));
    }

    std::ostringstream table;
    char line[160];
    std::snprintf(line, sizeof(line), "%-14s %-10s %-13s %-13s %s\n", "method", "converged",
                  "final_error", "residual", "linear_solves");
    table << line;
    for (const BenchRow& r : report.rows) {
        const std::string note = r.note.empty() ? "" : "(" + r.note + ")";
        std::snprintf(line, sizeof(line), "%-14s %-10s %-13.4g %-13.4g %ld %s\n",
                      r.method.c_str(), r.converged ? "yes" : "no", r.final_error,
                      r.final_residual, r.linear_solves, note.c_str());
        table << line;
    }
    report.table = table.str();
    return report;
}

} // namespace dsm
