#include "solver.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "errors.hpp"
#include "log.hpp"
#include "ode.hpp"
#include "path.hpp"

namespace dsm {

void IntegratorConfig::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw UsageError("tolerances must be positive");
    if (!(initial_step > 0.0)) throw UsageError("initial step must be positive");
    if (!(t_max > 0.0)) throw UsageError("t_max must be positive");
    if (max_steps <= 0) throw UsageError("max_steps must be positive");
    if (oracle_samples < 0) throw UsageError("oracle_samples must be nonnegative");
}

const char* to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::Converged: return "Converged";
        case SolveStatus::HorizonReached: return "HorizonReached";
        case SolveStatus::StepFailure: return "StepFailure";
        case SolveStatus::ResolventFailure: return "ResolventFailure";
    }
    return "Unknown";
}

Vector dsm_rhs(const OperatorProblem& problem, const Schedule& schedule, double t,
               const Vector& u, double* imag_norm_out) {
    const Complex a = schedule.a(t);
    const Vector fu_minus_f = problem.eval_apply(u) - problem.rhs();
    if (a.imag() == 0.0) {
        if (imag_norm_out) *imag_norm_out = 0.0;
        Vector residual = fu_minus_f + a.real() * u;
        return Vector(-problem.apply_resolvent(u, a.real(), residual));
    }
    ComplexVector residual = fu_minus_f.cast<Complex>() + a * u.cast<Complex>();
    ComplexVector h = problem.apply_resolvent(u, a, residual);
    if (imag_norm_out) *imag_norm_out = h.imag().norm();
    return Vector(-h.real());
}

namespace {

// Sample plan: log-spaced centers over (0, T] plus t = 0, and, when enabled,
// +/- delta neighbors around each interior center for the derivative audit.
struct SamplePlan {
    std::vector<double> times; // sorted, unique
    std::vector<double> centers;
    std::map<double, std::array<double, 2>> triplet_of_center; // center -> (left, right)
};

SamplePlan make_sample_plan(double t_max, const IntegratorConfig& cfg) {
    SamplePlan plan;
    const int m = cfg.oracle_samples;
    if (m == 0) return plan;
    std::vector<double> centers;
    centers.push_back(0.0);
    if (m > 1) {
        const double t_lo = std::min(1.0, t_max / 1e6);
        const double ratio = std::pow(t_max / t_lo, 1.0 / (m - 2 > 0 ? m - 2 : 1));
        double t = t_lo;
        for (int i = 0; i < m - 1; ++i) {
            centers.push_back(std::min(t, t_max));
            t *= ratio;
        }
        centers.back() = t_max;
    }
    std::sort(centers.begin(), centers.end());
    centers.erase(std::unique(centers.begin(), centers.end()), centers.end());

    plan.centers = centers;
    for (double c : centers) plan.times.push_back(c);
    if (cfg.audit_triplets) {
        for (double c : centers) {
            if (c <= 0.0 || c >= t_max) continue;
            const double delta = cfg.audit_delta_rel * std::max(c, 1.0);
            const double left = c - delta;
            const double right = c + delta;
            if (left <= 0.0 || right >= t_max) continue;
            plan.triplet_of_center[c] = {left, right};
            plan.times.push_back(left);
            plan.times.push_back(right);
        }
    }
    std::sort(plan.times.begin(), plan.times.end());
    plan.times.erase(std::unique(plan.times.begin(), plan.times.end()), plan.times.end());
    if (!plan.times.empty() && plan.times.front() == 0.0) plan.times.erase(plan.times.begin());
    return plan;
}

} // namespace

Trajectory dsm_solve(const OperatorProblem& problem, const Schedule& schedule, const Vector& u0,
                     const IntegratorConfig& cfg, bool with_oracles) {
    cfg.validate();
    problem.space().check_dimension(u0, "dsm solve");

    Trajectory traj;
    const Vector& f = problem.rhs();
    const double fnorm = problem.norm(f);
    const bool complex_ray = schedule.theta() != 0.0;
    const bool oracle_possible =
        with_oracles && cfg.oracle_samples > 0 && (!complex_ray || problem.is_linear());
    const std::optional<Vector>& y = problem.known_solution();

    SamplePlan plan = oracle_possible ? make_sample_plan(cfg.t_max, cfg)
                                      : SamplePlan{};
    std::map<double, std::size_t> point_at_time; // sample time -> points index

    double last_imag = 0.0;
    OdeRhs rhs = [&](double t, const Vector& u) {
        ++traj.resolvent_solves;
        return dsm_rhs(problem, schedule, t, u, &last_imag);
    };

    // Warm start for the distance oracle: the current state is within the
    // envelope of the target, so Newton converges in a few iterations.
    auto measure_dist_to_w = [&](double t, const Vector& u) -> std::optional<double> {
        if (!oracle_possible) return std::nullopt;
        const Complex a = schedule.a(t);
        try {
            if (complex_ray) {
                RegularizedSolveComplex sol = solve_regularized(problem, a, u.cast<Complex>());
                traj.oracle_newton_iters += sol.iters;
                traj.max_w_norm = std::max(traj.max_w_norm, problem.norm(sol.w));
                return problem.norm(ComplexVector(u.cast<Complex>() - sol.w));
            }
            RegularizedSolve sol = solve_regularized(problem, a.real(), u);
            traj.oracle_newton_iters += sol.iters;
            traj.max_w_norm = std::max(traj.max_w_norm, problem.norm(sol.w));
            return problem.norm(Vector(u - sol.w));
        } catch (const Error& e) {
            log::warn(std::string("distance oracle failed at t = ") + std::to_string(t) + ": " +
                      e.what());
            return std::nullopt;
        }
    };

    bool sample_front = !plan.centers.empty() && plan.centers.front() == 0.0;
    bool stopped_on_residual = false;

    OdeObserver observer = [&](const OdeStep& step) {
        const double t = step.t;
        const Vector& u = *step.y;
        TrajectoryPoint pt;
        pt.t = t;
        pt.r = schedule.r(t);
        pt.envelope = schedule.envelope(t);
        const Complex a = schedule.a(t);
        if (complex_ray) {
            ComplexVector res =
                (problem.eval_apply(u) - f).cast<Complex>() + a * u.cast<Complex>();
            pt.residual = problem.norm(res);
        } else {
            pt.residual = problem.norm(Vector(problem.eval_apply(u) + a.real() * u - f));
        }
        pt.imag_norm = last_imag;
        const double un = problem.norm(u);
        traj.max_u_norm = std::max(traj.max_u_norm, un);
        if (un > 0.0)
            traj.max_imag_ratio = std::max(traj.max_imag_ratio, last_imag / un);
        if (y && cfg.record_dist_to_y) pt.dist_to_y = problem.norm(Vector(u - *y));

        const bool is_sample =
            (t == 0.0 && sample_front) ||
            (step.forced_point &&
             std::binary_search(plan.times.begin(), plan.times.end(), t));
        if (is_sample) {
            pt.dist_to_w = measure_dist_to_w(t, u);
            point_at_time[t] = traj.points.size();
        }
        traj.points.push_back(std::move(pt));

        if (cfg.stop_residual > 0.0 && traj.points.back().residual <= cfg.stop_residual) {
            stopped_on_residual = true;
            return false;
        }
        return true;
    };

    OdeOptions opt;
    opt.rel_tol = cfg.rel_tol;
    opt.abs_tol = cfg.abs_tol;
    opt.initial_step = cfg.initial_step;
    opt.max_steps = cfg.max_steps;

    OdeResult run = integrate_ode(rhs, 0.0, u0, cfg.t_max, opt, plan.times, observer);

    traj.u_final = run.y_end;
    traj.t_final = run.t_end;
    traj.steps = run.steps;
    traj.rejected = run.rejected;
    traj.error_estimate = run.error_estimate;
    traj.step_rejection_rate =
        run.steps + run.rejected > 0
            ? static_cast<double>(run.rejected) / static_cast<double>(run.steps + run.rejected)
            : 0.0;
    if (!traj.points.empty()) {
        const TrajectoryPoint& lastp = traj.points.back();
        const double un = problem.norm(traj.u_final);
        traj.final_imag_ratio = un > 0.0 ? lastp.imag_norm / un : lastp.imag_norm;
    }

    switch (run.status) {
        case OdeStatus::Done:
            traj.status = SolveStatus::HorizonReached;
            break;
        case OdeStatus::ObserverStop:
            traj.status = stopped_on_residual ? SolveStatus::Converged
                                              : SolveStatus::HorizonReached;
            break;
        case OdeStatus::StepUnderflow:
        case OdeStatus::MaxSteps:
        case OdeStatus::BlowUp:
            traj.status = SolveStatus::StepFailure;
            traj.message = run.message;
            break;
        case OdeStatus::RhsFailure:
            traj.status = SolveStatus::ResolventFailure;
            traj.message = run.message;
            break;
    }
    // A horizon run that ends below the residual target still converged.
    if (traj.status == SolveStatus::HorizonReached && cfg.stop_residual > 0.0 &&
        !traj.points.empty() && traj.points.back().residual <= cfg.stop_residual)
        traj.status = SolveStatus::Converged;

    // Assemble the audit index groups from the recorded sample times.
    for (double c : plan.centers) {
        auto itc = point_at_time.find(c);
        if (itc == point_at_time.end()) continue;
        traj.oracle_indices.push_back(itc->second);
        auto trip = plan.triplet_of_center.find(c);
        if (trip == plan.triplet_of_center.end()) continue;
        auto itl = point_at_time.find(trip->second[0]);
        auto itr = point_at_time.find(trip->second[1]);
        if (itl == point_at_time.end() || itr == point_at_time.end()) continue;
        if (traj.points[itl->second].dist_to_w && traj.points[itc->second].dist_to_w &&
            traj.points[itr->second].dist_to_w)
            traj.audit_groups.push_back({itl->second, itc->second, itr->second});
    }
    return traj;
}

EnvelopeReport envelope_check(const Trajectory& traj, double tol_env) {
    EnvelopeReport report;
    report.tol_env = tol_env;
    for (const TrajectoryPoint& pt : traj.points) {
        if (!pt.dist_to_w) continue;
        EnvelopeRow row;
        row.t = pt.t;
        row.dist = *pt.dist_to_w;
        row.envelope = pt.envelope;
        row.rel_slack = (pt.envelope - row.dist) / pt.envelope;
        report.rows.push_back(row);
    }
    if (report.rows.size() < 10)
        throw UsageError("envelope check needs dist_to_w at 10 or more sample points");
    report.min_rel_slack = std::numeric_limits<double>::infinity();
    report.pass = true;
    for (const EnvelopeRow& row : report.rows) {
        report.min_rel_slack = std::min(report.min_rel_slack, row.rel_slack);
        if (row.dist > row.envelope * (1.0 + tol_env)) report.pass = false;
    }
    return report;
}

MasterInequalityReport master_inequality_audit(const Trajectory& traj, const Schedule& schedule,
                                               double rhs_norm_for_noise) {
    MasterInequalityReport report;
    if (traj.audit_groups.empty()) return report;
    const double b = schedule.b();
    const double p = schedule.p();
    const double c2 = schedule.c2();
    const double c3 = schedule.c3();
    // The oracle resolves w to the Newton tolerance; differencing two samples
    // doubles that noise.
    const double oracle_eps = 2e-11 * (1.0 + rhs_norm_for_noise);

    report.pass = true;
    for (const auto& group : traj.audit_groups) {
        const TrajectoryPoint& l = traj.points[group[0]];
        const TrajectoryPoint& c = traj.points[group[1]];
        const TrajectoryPoint& r = traj.points[group[2]];
        const double gl = *l.dist_to_w;
        const double gc = *c.dist_to_w;
        const double gr = *r.dist_to_w;

        AuditRow row;
        row.t = c.t;
        row.g = gc;
        const double hl = c.t - l.t;
        const double hr = r.t - c.t;
        row.gdot_fd = (gr - gl) / (hl + hr);
        const double fwd = (gr - gc) / hr;
        const double bwd = (gc - gl) / hl;
        row.disc_estimate = std::abs(fwd - bwd) + oracle_eps / std::min(hl, hr);
        const double rb = std::pow(c.r, -b);
        row.rhs_bound = -gc + c2 * std::abs(schedule.rdot(c.t)) * rb + c3 * rb * std::pow(gc, p);
        row.violation = row.gdot_fd - row.rhs_bound;
        row.ok = row.violation <= 10.0 * row.disc_estimate;
        if (row.disc_estimate > 0.0)
            report.worst_ratio = std::max(report.worst_ratio, row.violation / row.disc_estimate);
        report.pass = report.pass && row.ok;
        report.rows.push_back(row);
    }
    return report;
}

} // namespace dsm
