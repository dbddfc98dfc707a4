#pragma once

#include <optional>
#include <vector>

#include "operator_problem.hpp"
#include "schedule.hpp"

namespace dsm {

struct IntegratorConfig {
    double initial_step = 0.01;
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    double t_max = 100.0;
    double stop_residual = 0.0; // <= 0 disables the residual stop
    long max_steps = 2'000'000;
    int oracle_samples = 32;    // distance-to-path sample count (log spaced)
    bool audit_triplets = true; // clustered +/- delta samples for the gdot audit
    double audit_delta_rel = 1e-3;
    bool record_dist_to_y = true;
    void validate() const;
};

enum class SolveStatus { Converged, HorizonReached, StepFailure, ResolventFailure };

const char* to_string(SolveStatus status);

struct TrajectoryPoint {
    double t = 0.0;
    double r = 0.0;
    double residual = 0.0; // ||F(u) + a(t) u - f||
    double envelope = 0.0; // r^k(t)/lambda
    std::optional<double> dist_to_w;
    std::optional<double> dist_to_y;
    double imag_norm = 0.0; // discarded imaginary update norm (theta != 0)
};

struct Trajectory {
    std::vector<TrajectoryPoint> points;
    SolveStatus status = SolveStatus::HorizonReached;
    std::string message;
    Vector u_final;
    double t_final = 0.0;
    long steps = 0;
    long rejected = 0;
    long resolvent_solves = 0;
    long oracle_newton_iters = 0;
    double step_rejection_rate = 0.0;
    double max_u_norm = 0.0;
    double max_w_norm = 0.0;       // over oracle samples
    double max_imag_ratio = 0.0;   // max ||Im h|| / ||u||
    double final_imag_ratio = 0.0;
    double error_estimate = 0.0;   // accumulated integrator error bound
    // Indices into points: all oracle samples, and (left, center, right)
    // triplets for the finite-difference audit.
    std::vector<std::size_t> oracle_indices;
    std::vector<std::array<std::size_t, 3>> audit_groups;
};

// Right side of the flow: -(A(u) + a(t) I)^{-1} [F(u) + a(t) u - f].
// For complex a(t) the update is the real part; the discarded imaginary norm
// is returned through imag_norm_out when non-null.
Vector dsm_rhs(const OperatorProblem& problem, const Schedule& schedule, double t,
               const Vector& u, double* imag_norm_out = nullptr);

// Integrates the flow with an embedded adaptive Runge-Kutta 4/5 pair. When
// with_oracles is set, dist_to_w is measured by fresh regularized solves at
// log-spaced sample times (plus audit triplets), and dist_to_y whenever the
// problem knows its solution.
Trajectory dsm_solve(const OperatorProblem& problem, const Schedule& schedule, const Vector& u0,
                     const IntegratorConfig& config, bool with_oracles = true);

struct EnvelopeRow {
    double t = 0.0;
    double dist = 0.0;
    double envelope = 0.0;
    double rel_slack = 0.0; // (envelope - dist)/envelope
};

struct EnvelopeReport {
    std::vector<EnvelopeRow> rows;
    double min_rel_slack = 0.0;
    double tol_env = 0.05;
    bool pass = false;
};

// Checks dist_to_w <= envelope (1 + tol_env) at every sampled point.
// Requires at least 10 dist_to_w samples.
EnvelopeReport envelope_check(const Trajectory& trajectory, double tol_env = 0.05);

struct AuditRow {
    double t = 0.0;
    double g = 0.0;
    double gdot_fd = 0.0;     // centered difference
    double rhs_bound = 0.0;   // -g + c2 |rdot| r^{-b} + c3 r^{-b} g^p
    double violation = 0.0;   // gdot_fd - rhs_bound
    double disc_estimate = 0.0;
    bool ok = false;
};

struct MasterInequalityReport {
    std::vector<AuditRow> rows;
    bool pass = false;
    double worst_ratio = 0.0; // max violation / disc_estimate
};

// Numerical audit of the central estimate: the finite-difference derivative
// of g(t) = dist_to_w may exceed the bound by at most 10x the local
// discretization estimate (the fwd/bwd difference spread plus oracle noise).
MasterInequalityReport master_inequality_audit(const Trajectory& trajectory,
                                               const Schedule& schedule,
                                               double rhs_norm_for_noise);

} // namespace dsm
