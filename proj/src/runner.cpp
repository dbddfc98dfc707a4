#include "runner.hpp"

#include <cmath>
#include <filesystem>
#include <sstream>

#include "errors.hpp"
#include "log.hpp"
#include "manifest.hpp"

namespace dsm {

using nlohmann::json;

json SolveArgs::to_json() const {
    json doc = json::object();
    auto put = [&](const char* key, const std::optional<double>& v) {
        if (v) doc[key] = *v;
    };
    put("r0", r0);
    put("g0", g0);
    put("c2", c2);
    put("kappa", kappa);
    put("c0", c0);
    put("c1", c1);
    put("b", b);
    put("eps0", eps0);
    put("theta", theta);
    put("r_target", r_target);
    put("t_max", t_max);
    put("stop_residual", stop_residual);
    put("rel_tol", rel_tol);
    put("abs_tol", abs_tol);
    put("initial_step", initial_step);
    if (oracle_samples) doc["oracle_samples"] = *oracle_samples;
    if (u0) doc["u0"] = *u0;
    doc["force"] = force;
    doc["estimate_constants"] = estimate_constants;
    doc["seed"] = seed;
    return doc;
}

SolveArgs SolveArgs::from_json(const json& doc) {
    SolveArgs args;
    auto get = [&](const char* key, std::optional<double>& v) {
        if (doc.contains(key)) v = doc.at(key).get<double>();
    };
    get("r0", args.r0);
    get("g0", args.g0);
    get("c2", args.c2);
    get("kappa", args.kappa);
    get("c0", args.c0);
    get("c1", args.c1);
    get("b", args.b);
    get("eps0", args.eps0);
    get("theta", args.theta);
    get("r_target", args.r_target);
    get("t_max", args.t_max);
    get("stop_residual", args.stop_residual);
    get("rel_tol", args.rel_tol);
    get("abs_tol", args.abs_tol);
    get("initial_step", args.initial_step);
    if (doc.contains("oracle_samples")) args.oracle_samples = doc.at("oracle_samples").get<int>();
    if (doc.contains("u0")) args.u0 = doc.at("u0").get<std::vector<double>>();
    args.force = doc.value("force", false);
    args.estimate_constants = doc.value("estimate_constants", false);
    args.seed = doc.value("seed", std::uint64_t{1});
    return args;
}

namespace {

struct Constants {
    double c0, kappa, c1, b, eps0, theta;
    std::string smoothness_from;
    std::string resolvent_from;
};

Constants resolve_constants(const OperatorProblem& problem, const SolveArgs& args) {
    Constants c;
    c.c0 = problem.smoothness().c0;
    c.kappa = problem.smoothness().kappa;
    c.c1 = problem.resolvent().c1;
    c.b = problem.resolvent().b;
    c.eps0 = problem.resolvent().eps0;
    c.theta = problem.resolvent().theta;
    c.smoothness_from = to_string(problem.provenance());
    c.resolvent_from = to_string(problem.provenance());

    const bool estimate =
        args.estimate_constants || problem.provenance() == ConstantProvenance::Estimated;
    if (estimate) {
        const int n = problem.dimension();
        Vector center = Vector::Zero(n);
        HolderEstimate h = estimate_holder_constants(problem, 200, 1.0, center, args.seed);
        c.c0 = h.c0;
        c.kappa = h.kappa;
        c.smoothness_from = "estimated";
        std::vector<double> grid;
        for (double r = 1e-4; r < 1.0; r *= 4.0) grid.push_back(r);
        ResolventEstimate re = estimate_resolvent_constants(problem, center, grid);
        c.c1 = re.c1;
        c.b = re.b;
        c.resolvent_from = "estimated";
    }
    if (args.c0) c.c0 = *args.c0, c.smoothness_from = "asserted";
    if (args.kappa) c.kappa = *args.kappa, c.smoothness_from = "asserted";
    if (args.c1) c.c1 = *args.c1, c.resolvent_from = "asserted";
    if (args.b) c.b = *args.b, c.resolvent_from = "asserted";
    if (args.eps0) c.eps0 = *args.eps0;
    if (args.theta) c.theta = *args.theta;
    return c;
}

double distance_to(const OperatorProblem& problem, const Vector& u, const PathEntry& entry) {
    if (entry.w.size() > 0) return problem.norm(Vector(u - entry.w));
    return problem.norm(ComplexVector(u.cast<Complex>() - entry.w_complex));
}

} // namespace

RunPlan plan_run(const OperatorProblem& problem, const SolveArgs& args) {
    const int n = problem.dimension();
    Constants consts = resolve_constants(problem, args);

    // The schedule is derived for the requested ray; rebuild the problem view
    // only through the inputs (the problem itself is immutable).
    RunPlan plan;
    plan.u0 = Vector::Zero(n);
    plan.u0_policy = "zero";
    if (args.u0) {
        if (static_cast<int>(args.u0->size()) != n)
            throw UsageError("u0 dimension does not match the problem");
        plan.u0 = Eigen::Map<const Vector>(args.u0->data(), n);
        plan.u0_policy = "explicit";
    }

    double r0 = args.r0 ? *args.r0 : std::min(1.0, 0.5 * consts.eps0);
    if (!(r0 > 0.0 && r0 < consts.eps0))
        throw UsageError("r0 must lie in (0, eps0)");

    const double kappa_clamped = std::min(std::max(consts.kappa, 1e-6), 1.0);
    const double k_exponent = derive_exponent(consts.b, kappa_clamped);

    Vector u0 = plan.u0;
    for (int attempt = 0; attempt < 6; ++attempt) {
        plan.coarse_path = track_path(problem, default_path_moduli(r0), u0);
        if (plan.coarse_path.entries.empty())
            throw NoConvergenceError(0.0, 0, "coarse path tracking produced no entries");
        const PathEntry& first = plan.coarse_path.entries.front();

        plan.g0_measured = distance_to(problem, u0, first);
        double c2 = args.c2 ? *args.c2 : 1.1 * consts.c1 * plan.coarse_path.max_w_norm;
        if (!(c2 > 0.0)) c2 = 1.0;

        double g0 = args.g0 ? *args.g0 : plan.g0_measured;
        const double floor = 1e-8 * std::pow(r0, k_exponent);
        plan.g0_floor_applied = false;
        if (!args.g0 && g0 < floor) {
            g0 = floor;
            plan.g0_floor_applied = true;
        }

        plan.inputs = ScheduleInputs{consts.b, kappa_clamped, consts.c0, consts.c1,
                                     c2,        g0,            r0,        consts.theta,
                                     consts.eps0};
        plan.schedule = derive_schedule(plan.inputs);
        plan.gates = validate_initial_conditions(plan.schedule, plan.inputs);
        if (plan.gates.all_pass) break;

        // Remediation: adjust only knobs the caller left free.
        bool changed = false;
        if (!plan.gates.initial_radius().pass && !args.r0) {
            const double needed = plan.gates.initial_radius().lhs * 1.05;
            if (needed < consts.eps0) {
                r0 = needed;
                changed = true;
            }
        } else if ((!plan.gates.initial_distance().pass || !plan.gates.decay_rate().pass) &&
                   !args.g0 && !args.u0) {
            // Both distance-type gates bound g0; pull u0 toward w_{a(0)}.
            const double bound =
                (plan.inputs.c2 / plan.schedule.k()) *
                std::pow(r0, -std::abs(plan.inputs.b - 1.0));
            const double target = 0.5 * bound;
            if (target < plan.g0_measured && plan.g0_measured > 0.0) {
                const double xi = target / plan.g0_measured;
                if (first.w.size() > 0) {
                    u0 = first.w + xi * (u0 - first.w);
                } else {
                    // Complex path head: move toward the real part.
                    Vector wr = first.w_complex.real();
                    u0 = wr + xi * (u0 - wr);
                }
                plan.u0_policy = "pulled";
                changed = true;
            }
        }
        if (!changed) break;
    }
    plan.u0 = u0;

    // Horizon selection.
    double r_target;
    if (args.r_target) {
        r_target = *args.r_target;
    } else if (problem.known_solution()) {
        const double yn = problem.norm(*problem.known_solution());
        r_target = std::min(1e-2, 4e-4 * (1.0 + yn) / std::max(yn, 1e-3));
    } else {
        r_target = 1e-3;
    }
    r_target = std::min(r_target, 0.5 * r0);
    plan.r_target = r_target;
    plan.t_max = args.t_max ? *args.t_max : plan.schedule.time_for_radius(r_target);

    plan.stop_residual =
        args.stop_residual ? *args.stop_residual : 1e-8 * (1.0 + problem.norm(problem.rhs()));
    plan.integrator.t_max = plan.t_max;
    plan.integrator.stop_residual = plan.stop_residual;
    if (args.rel_tol) plan.integrator.rel_tol = *args.rel_tol;
    if (args.abs_tol) plan.integrator.abs_tol = *args.abs_tol;
    if (args.initial_step) plan.integrator.initial_step = *args.initial_step;
    if (args.oracle_samples) plan.integrator.oracle_samples = *args.oracle_samples;

    plan.constants = json{{"c0", consts.c0},
                          {"kappa", consts.kappa},
                          {"c1", consts.c1},
                          {"b", consts.b},
                          {"eps0", consts.eps0},
                          {"theta", consts.theta},
                          {"smoothness_provenance", consts.smoothness_from},
                          {"resolvent_provenance", consts.resolvent_from}};
    return plan;
}

namespace {

json plan_json(const RunPlan& plan) {
    return json{{"g0_measured", plan.g0_measured},
                {"g0_floor_applied", plan.g0_floor_applied},
                {"u0_policy", plan.u0_policy},
                {"r_target", plan.r_target},
                {"t_max", plan.t_max},
                {"stop_residual", plan.stop_residual}};
}

json integrator_json(const IntegratorConfig& cfg) {
    return json{{"initial_step", cfg.initial_step}, {"rel_tol", cfg.rel_tol},
                {"abs_tol", cfg.abs_tol},           {"t_max", cfg.t_max},
                {"stop_residual", cfg.stop_residual}, {"max_steps", cfg.max_steps},
                {"oracle_samples", cfg.oracle_samples}};
}

} // namespace

SolveOutcome run_solve(const OperatorProblem& problem, const json& descriptor,
                       const SolveArgs& args, const std::string& out_dir) {
    SolveOutcome outcome;
    outcome.plan = plan_run(problem, args);
    RunPlan& plan = outcome.plan;

    json manifest;
    manifest["tool"] = tool_version();
    manifest["seed"] = args.seed;
    manifest["problem"] = descriptor;
    manifest["args"] = args.to_json();
    manifest["constants"] = plan.constants;
    manifest["schedule"] = schedule_json(plan.schedule);
    manifest["gates"] = gates_json(plan.gates);
    manifest["plan"] = plan_json(plan);
    manifest["integrator"] = integrator_json(plan.integrator);

    if (!plan.gates.all_pass && !args.force) {
        outcome.gates_blocked = true;
        outcome.exit_code = 2;
        manifest["status"] = "GateFailure";
        std::ostringstream msg;
        for (const GateCheck& g : plan.gates.gates)
            if (!g.pass)
                msg << "gate '" << g.name << "' failed (lhs " << g.lhs << " vs rhs " << g.rhs
                    << "): " << g.remediation << "\n";
        manifest["gate_failure"] = msg.str();
        log::error(msg.str());
        outcome.manifest = manifest;
        if (!out_dir.empty())
            write_file_atomic(out_dir + "/manifest.json", manifest.dump(2) + "\n");
        return outcome;
    }
    if (!plan.gates.all_pass) {
        manifest["gates_forced"] = true;
        log::warn("gates failed; proceeding under --force");
    }

    Trajectory traj;
    try {
        traj = dsm_solve(problem, plan.schedule, plan.u0, plan.integrator, true);
    } catch (const Error& e) {
        manifest["status"] = "SolverFailure";
        manifest["error"] = e.what();
        outcome.exit_code = 3;
        outcome.manifest = manifest;
        if (!out_dir.empty())
            write_file_atomic(out_dir + "/manifest.json", manifest.dump(2) + "\n");
        return outcome;
    }

    manifest["status"] = to_string(traj.status);
    manifest["metrics"] = trajectory_metrics_json(traj);

    bool checks_ok = true;
    long with_w = 0;
    for (const TrajectoryPoint& pt : traj.points)
        if (pt.dist_to_w) ++with_w;
    if (with_w >= 10) {
        EnvelopeReport env = envelope_check(traj);
        manifest["envelope_check"] = envelope_json(env);
        const double fnorm = problem.norm(problem.rhs());
        MasterInequalityReport audit = master_inequality_audit(traj, plan.schedule, fnorm);
        manifest["master_inequality"] = audit_json(audit);
        if (plan.gates.all_pass) {
            checks_ok = env.pass && (audit.rows.empty() || audit.pass);
        }
        outcome.envelope = std::move(env);
        outcome.audit = std::move(audit);
    }

    const bool horizon_requested = args.t_max.has_value() || args.r_target.has_value() ||
                                   plan.stop_residual <= 0.0;
    switch (traj.status) {
        case SolveStatus::Converged:
            outcome.exit_code = checks_ok ? 0 : 1;
            break;
        case SolveStatus::HorizonReached:
            outcome.exit_code = horizon_requested ? (checks_ok ? 0 : 1) : 3;
            break;
        case SolveStatus::StepFailure:
        case SolveStatus::ResolventFailure:
            outcome.exit_code = 3;
            break;
    }
    manifest["exit_code"] = outcome.exit_code;

    outcome.trace_csv = trajectory_csv(traj);
    outcome.path_csv_text = path_csv(plan.coarse_path, problem);
    manifest["outputs"] = json{{"trace", "trace.csv"}, {"path", "path.csv"}};
    outcome.trajectory = std::move(traj);
    outcome.manifest = manifest;

    if (!out_dir.empty()) {
        write_file_atomic(out_dir + "/trace.csv", outcome.trace_csv);
        write_file_atomic(out_dir + "/path.csv", outcome.path_csv_text);
        write_file_atomic(out_dir + "/manifest.json", manifest.dump(2) + "\n");
    }
    return outcome;
}

json run_schedule(const OperatorProblem& problem, const json& descriptor, const SolveArgs& args) {
    RunPlan plan = plan_run(problem, args);
    json doc;
    doc["tool"] = tool_version();
    doc["problem"] = descriptor;
    doc["constants"] = plan.constants;
    doc["schedule"] = schedule_json(plan.schedule);
    doc["gates"] = gates_json(plan.gates);
    doc["plan"] = plan_json(plan);
    return doc;
}

} // namespace dsm
