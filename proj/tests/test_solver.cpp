#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "errors.hpp"
#include "gallery.hpp"
#include "path.hpp"
#include "runner.hpp"
#include "schedule.hpp"
#include "solver.hpp"

using namespace dsm;

namespace {

OperatorProblem scalar_identity(double f_value) {
    OperatorProblemConfig cfg{VectorSpace(1)};
    cfg.name = "identity";
    cfg.linear_matrix = Matrix::Identity(1, 1);
    cfg.rhs = Vector::Constant(1, f_value);
    cfg.known_solution = Vector::Constant(1, f_value);
    cfg.resolvent.eps0 = 1e3;
    return OperatorProblem(std::move(cfg));
}

ScheduleInputs worked_inputs() {
    ScheduleInputs in;
    in.b = 1.0;
    in.kappa = 1.0;
    in.c0 = 0.0;
    in.c1 = 1.0;
    in.c2 = 1.0;
    in.g0 = 0.25;
    in.r0 = 1.0;
    in.eps0 = 10.0;
    return in;
}

// Independent oracle for the scalar flow udot = -u + 1/(1 + r(t)), u(0) = 0:
// u(T) = int_0^T e^{-(T-s)} / (1 + r(s)) ds, evaluated by Simpson quadrature
// over the exponentially weighted window.
double scalar_oracle(const Schedule& s, double t_end) {
    const double window = std::min(t_end, 45.0);
    const int m = 200000; // even
    const double h = window / m;
    auto integrand = [&](double tau) { return std::exp(-tau) / (1.0 + s.r(t_end - tau)); };
    double acc = integrand(0.0) + integrand(window);
    for (int i = 1; i < m; ++i) acc += integrand(i * h) * (i % 2 == 0 ? 2.0 : 4.0);
    return acc * h / 3.0;
}

} // namespace

TEST_CASE("equilibrium start converges at the first check") {
    OperatorProblem prob = scalar_identity(0.0);
    Schedule s = derive_schedule(worked_inputs());
    IntegratorConfig cfg;
    cfg.t_max = 10.0;
    cfg.stop_residual = 1e-8;
    Trajectory traj = dsm_solve(prob, s, Vector(Vector::Zero(1)), cfg, false);
    CHECK(traj.status == SolveStatus::Converged);
    CHECK(traj.points.size() == 1);
    CHECK(traj.u_final[0] == 0.0);
}

TEST_CASE("flow right side: scalar arithmetic") {
    OperatorProblem prob = scalar_identity(1.0);
    ScheduleInputs in = worked_inputs();
    Schedule s = derive_schedule(in);
    // at t with r = 0.25: u = 1 -> -(1.25)^{-1}(1 + 0.25 - 1) = -0.2
    const double t = s.time_for_radius(0.25);
    Vector u = Vector::Constant(1, 1.0);
    Vector rhs = dsm_rhs(prob, s, t, u);
    CHECK(rhs[0] == doctest::Approx(-0.2).epsilon(1e-12));
}

TEST_CASE("flow right side: zero at the equilibrium and resolvent-bounded") {
    GalleryParams p;
    p.n = 4;
    p.kappa = 1.0;
    OperatorProblem prob = make_gallery("monotone-holder", p);
    Schedule s = derive_schedule(worked_inputs());
    for (double t : {0.0, 2.0, 20.0}) {
        const double r = s.r(t);
        RegularizedSolve w = solve_regularized(prob, r, Vector(Vector::Zero(4)));
        Vector rhs = dsm_rhs(prob, s, t, w.w);
        const double residual = prob.norm(Vector(prob.eval_apply(w.w) + r * w.w - prob.rhs()));
        // ||rhs|| <= c1 r^{-b} ||residual||
        CHECK(prob.norm(rhs) <= prob.resolvent().c1 * std::pow(r, -1.0) * residual + 1e-13);
    }
}

TEST_CASE("scalar flow tracks the regularized path against the quadrature oracle") {
    OperatorProblem prob = scalar_identity(1.0);
    Schedule s = derive_schedule(worked_inputs());
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-10;
    cfg.abs_tol = 1e-12;
    cfg.stop_residual = 0.0;
    cfg.oracle_samples = 0;
    cfg.audit_triplets = false;
    cfg.t_max = s.time_for_radius(5e-4);
    Trajectory traj = dsm_solve(prob, s, Vector(Vector::Zero(1)), cfg, false);
    REQUIRE(traj.status == SolveStatus::HorizonReached);
    const double oracle = scalar_oracle(s, cfg.t_max);
    CHECK(std::abs(traj.u_final[0] - oracle) <= 1e-6);
    // dist to y = 1 is below 1e-3 once r <= 3e-2 has long passed.
    CHECK(s.r(cfg.t_max) <= 3e-2);
    CHECK(std::abs(traj.u_final[0] - 1.0) <= 1e-3);
}

TEST_CASE("intermediate times also match the oracle") {
    OperatorProblem prob = scalar_identity(1.0);
    Schedule s = derive_schedule(worked_inputs());
    for (double t_end : {5.0, 40.0, 300.0}) {
        IntegratorConfig cfg;
        cfg.rel_tol = 1e-10;
        cfg.abs_tol = 1e-12;
        cfg.stop_residual = 0.0;
        cfg.oracle_samples = 0;
        cfg.audit_triplets = false;
        cfg.t_max = t_end;
        Trajectory traj = dsm_solve(prob, s, Vector(Vector::Zero(1)), cfg, false);
        CHECK(std::abs(traj.u_final[0] - scalar_oracle(s, t_end)) <= 1e-8);
    }
}

TEST_CASE("gate-validated monotone run stays inside the envelope") {
    GalleryParams p;
    p.n = 2;
    p.kappa = 1.0;
    OperatorProblem prob = make_gallery("monotone-holder", p);
    SolveArgs args;
    RunPlan plan = plan_run(prob, args);
    REQUIRE(plan.gates.all_pass);
    IntegratorConfig cfg = plan.integrator;
    cfg.rel_tol = 1e-10;
    cfg.abs_tol = 1e-12;
    cfg.stop_residual = 0.0;
    cfg.oracle_samples = 36;
    cfg.t_max = plan.schedule.time_for_radius(plan.inputs.r0 / 20.0);
    Trajectory traj = dsm_solve(prob, plan.schedule, plan.u0, cfg, true);
    REQUIRE(traj.status == SolveStatus::HorizonReached);

    EnvelopeReport env = envelope_check(traj);
    CHECK(env.rows.size() >= 32);
    CHECK(env.pass);
    CHECK(env.min_rel_slack > 0.0);

    // Trajectory r values match the schedule exactly.
    for (const TrajectoryPoint& pt : traj.points)
        CHECK(pt.r == doctest::Approx(plan.schedule.r(pt.t)).epsilon(1e-14));

    // Boundedness: sup ||u|| <= sup ||w|| + envelope(0) + tol.
    CHECK(traj.max_u_norm <= traj.max_w_norm + plan.schedule.envelope(0.0) + 1e-9);

    // Master inequality audit.
    MasterInequalityReport audit =
        master_inequality_audit(traj, plan.schedule, prob.norm(prob.rhs()));
    REQUIRE_FALSE(audit.rows.empty());
    CHECK(audit.pass);
}

TEST_CASE("unvalidated schedules still run and report") {
    GalleryParams p;
    p.n = 2;
    p.kappa = 1.0;
    OperatorProblem prob = make_gallery("monotone-holder", p);
    ScheduleInputs in = worked_inputs();
    in.g0 = 3.0; // violates the initial-distance gate
    in.c0 = 2.0;
    in.c1 = 1.0;
    Schedule s = derive_schedule(in);
    GateReport gates = validate_initial_conditions(s, in);
    CHECK_FALSE(gates.all_pass);
    IntegratorConfig cfg;
    cfg.t_max = s.time_for_radius(in.r0 / 10.0);
    cfg.stop_residual = 0.0;
    cfg.oracle_samples = 16;
    Trajectory traj = dsm_solve(prob, s, Vector(Vector::Zero(2)), cfg, true);
    CHECK(traj.status == SolveStatus::HorizonReached);
    EnvelopeReport env = envelope_check(traj); // outcome recorded, not guaranteed
    CHECK(env.rows.size() >= 10);
}

TEST_CASE("envelope check requires enough oracle samples") {
    OperatorProblem prob = scalar_identity(1.0);
    Schedule s = derive_schedule(worked_inputs());
    IntegratorConfig cfg;
    cfg.t_max = 5.0;
    cfg.stop_residual = 0.0;
    cfg.oracle_samples = 0;
    Trajectory traj = dsm_solve(prob, s, Vector(Vector::Zero(1)), cfg, false);
    CHECK_THROWS_AS(envelope_check(traj), UsageError);
}

TEST_CASE("halving the tolerance moves the endpoint within the error estimate") {
    OperatorProblem prob = scalar_identity(1.0);
    Schedule s = derive_schedule(worked_inputs());
    auto run = [&](double rel) {
        IntegratorConfig cfg;
        cfg.rel_tol = rel;
        cfg.abs_tol = 1e-12;
        cfg.stop_residual = 0.0;
        cfg.oracle_samples = 0;
        cfg.audit_triplets = false;
        cfg.t_max = 200.0;
        return dsm_solve(prob, s, Vector(Vector::Zero(1)), cfg, false);
    };
    Trajectory a = run(1e-8);
    Trajectory b = run(5e-9);
    const double diff = std::abs(a.u_final[0] - b.u_final[0]);
    CHECK(diff <= 10.0 * std::max(a.error_estimate, b.error_estimate));
}

TEST_CASE("complex ray keeps the state real and the tail imaginary part tiny") {
    GalleryParams p;
    p.n = 2;
    p.seed = 3;
    p.theta = M_PI / 2;
    OperatorProblem prob = make_gallery("wellposed-linear", p);
    SolveArgs args;
    args.theta = M_PI / 2;
    args.r_target = 1e-9;
    RunPlan plan = plan_run(prob, args);
    REQUIRE(plan.gates.all_pass);
    REQUIRE(plan.schedule.theta() == doctest::Approx(M_PI / 2));
    IntegratorConfig cfg = plan.integrator;
    cfg.stop_residual = 0.0;
    cfg.oracle_samples = 12;
    cfg.audit_triplets = false;
    Trajectory traj = dsm_solve(prob, plan.schedule, plan.u0, cfg, true);
    REQUIRE(traj.status == SolveStatus::HorizonReached);
    // The discarded imaginary update decays with r; at r <= 1e-9 it is
    // far below 1e-8 ||u||.
    CHECK(traj.final_imag_ratio <= 1e-8);
    const Vector& y = *prob.known_solution();
    CHECK(prob.norm(Vector(traj.u_final - y)) <= 1e-3 * (1.0 + prob.norm(y)));
}

TEST_CASE("step failure surfaces as a status, not an exception") {
    OperatorProblem prob = scalar_identity(1.0);
    Schedule s = derive_schedule(worked_inputs());
    IntegratorConfig cfg;
    cfg.t_max = 1e6;
    cfg.stop_residual = 0.0;
    cfg.max_steps = 5;
    cfg.oracle_samples = 0;
    Trajectory traj = dsm_solve(prob, s, Vector(Vector::Zero(1)), cfg, false);
    CHECK(traj.status == SolveStatus::StepFailure);
}
