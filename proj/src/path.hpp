#pragma once

#include <optional>
#include <span>
#include <vector>

#include "operator_problem.hpp"
#include "schedule.hpp"

namespace dsm {

struct NewtonOptions {
    double tol_scale = 1e-12; // converged when ||G|| <= tol_scale (1 + ||f||)
    int max_iters = 100;
    double backtrack_factor = 0.5;
    double min_step = 9.313225746154785e-10; // 2^{-30}
    double decrease = 1e-4;                  // sufficient-decrease slope
};

struct RegularizedSolve {
    Vector w;
    double residual = 0.0;
    int iters = 0;
};

struct RegularizedSolveComplex {
    ComplexVector w;
    double residual = 0.0;
    int iters = 0;
};

// Damped Newton on G(w) = F(w) + a w - f, with the shifted Jacobian
// A(w) + aI as the Newton matrix. Throws NoConvergenceError after
// max_iters, ResolventSingularError from the factorization.
RegularizedSolve solve_regularized(const OperatorProblem& problem, double a, const Vector& guess,
                                   const NewtonOptions& options = {});

// Complex shifts force complex solutions; supported for linear problems,
// where w_a = (M + aI)^{-1} f directly.
RegularizedSolveComplex solve_regularized(const OperatorProblem& problem, Complex a,
                                          const ComplexVector& guess,
                                          const NewtonOptions& options = {});

struct PathEntry {
    Complex a;
    Vector w;                 // real-path entry
    ComplexVector w_complex;  // filled instead when theta != 0
    double residual = 0.0;
    int newton_iters = 0;
};

struct RegularizedPath {
    std::vector<PathEntry> entries;
    std::optional<Vector> limit_estimate;
    std::optional<ComplexVector> limit_estimate_complex;
    bool cauchy_decreasing = true; // ||w_{j+1} - w_j|| nonincreasing
    std::vector<double> step_norms;
    bool aborted = false;
    std::string abort_reason;
    double max_w_norm = 0.0;
};

// Warm-start continuation along strictly decreasing |a| values on the
// problem's ray. The first NoConvergence aborts the tail and returns the
// valid prefix.
RegularizedPath track_path(const OperatorProblem& problem, std::span<const double> a_moduli,
                           const Vector& w_start, const NewtonOptions& options = {});

// Default modulus sequence: geometric with ratio 1/2 from r0 down to
// max(floor, r0 2^{-40}).
std::vector<double> default_path_moduli(double r0, double floor = 1e-8);

struct PathDerivativeRow {
    double t = 0.0;
    double r = 0.0;
    double analytic_norm = 0.0; // ||wdot|| from the implicit-derivative formula
    double fd_norm = 0.0;       // centered difference along the path
    double agreement_error = 0.0;
    bool agree = false;
    bool bound_c1_ok = false; // ||wdot|| <= c1 |adot| r^{-b} ||w||
    bool bound_c2_ok = false; // ||wdot|| <= c2 |rdot| r^{-b}
};

struct PathDerivativeReport {
    std::vector<PathDerivativeRow> rows;
    bool all_agree = true;
    bool bounds_pass = true;
};

// Compares wdot computed from wdot = -adot (A(w) + aI)^{-1} w against finite
// differences along the path, then audits the two derivative bounds with the
// schedule's constants. Entries must lie on the schedule's decay law.
PathDerivativeReport path_derivative_check(const OperatorProblem& problem,
                                           const RegularizedPath& path,
                                           const Schedule& schedule);

struct NormalSolutionResult {
    Vector y;
    std::vector<double> step_norms;     // ||y_{j+1} - y_j||
    std::vector<double> iterate_norms;  // ||y_j||
    std::vector<double> residual_norms; // ||A y_j - f||
};

// Minimal-norm solution of A y = f through the monotone reduction
// T = A^T A: iterates y_a = (T + aI)^{-1} A^T f along decreasing a.
NormalSolutionResult normal_solution(const Matrix& a_matrix, const Vector& f,
                                     std::span<const double> a_sequence);

} // namespace dsm
