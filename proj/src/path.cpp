#include "path.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Cholesky>

#include "errors.hpp"
#include "log.hpp"

namespace dsm {

RegularizedSolve solve_regularized(const OperatorProblem& problem, double a, const Vector& guess,
                                   const NewtonOptions& opt) {
    if (!(a != 0.0)) throw UsageError("regularized solve needs a nonzero shift");
    problem.space().check_dimension(guess, "regularized solve");

    const Vector& f = problem.rhs();
    const double tol = opt.tol_scale * (1.0 + problem.norm(f));
    Vector w = guess;
    auto residual_of = [&](const Vector& x) { return Vector(problem.eval_apply(x) + a * x - f); };
    Vector g = residual_of(w);
    double gn = problem.norm(g);

    for (int iter = 0; iter < opt.max_iters; ++iter) {
        if (gn <= tol) return RegularizedSolve{w, gn, iter};
        Vector step = problem.apply_resolvent(w, a, Vector(-g));
        double s = 1.0;
        bool accepted = false;
        while (s >= opt.min_step) {
            Vector w_try = w + s * step;
            Vector g_try = residual_of(w_try);
            const double gn_try = problem.norm(g_try);
            if (gn_try <= (1.0 - opt.decrease * s) * gn) {
                w = std::move(w_try);
                g = std::move(g_try);
                gn = gn_try;
                accepted = true;
                break;
            }
            s *= opt.backtrack_factor;
        }
        if (!accepted) {
            std::ostringstream msg;
            msg << "damped Newton stalled at residual " << gn << " (|a| = " << std::abs(a) << ")";
            throw NoConvergenceError(gn, iter, msg.str());
        }
    }
    if (gn <= tol) return RegularizedSolve{w, gn, opt.max_iters};
    std::ostringstream msg;
    msg << "no convergence in " << opt.max_iters << " iterations; last residual " << gn;
    throw NoConvergenceError(gn, opt.max_iters, msg.str());
}

RegularizedSolveComplex solve_regularized(const OperatorProblem& problem, Complex a,
                                          const ComplexVector& guess, const NewtonOptions& opt) {
    if (a.imag() == 0.0) {
        if (!guess.imag().isZero(0.0))
            throw UsageError("real-shift solve takes a real initial guess");
        RegularizedSolve real = solve_regularized(problem, a.real(), Vector(guess.real()), opt);
        return RegularizedSolveComplex{real.w.cast<Complex>(), real.residual, real.iters};
    }
    if (!problem.is_linear())
        throw UsageError(
            "complex shifts need a complex solution; only linear problems support them "
            "(use theta = 0 for nonlinear problems)");
    // Linear case: F(w) + a w = f is one shifted solve.
    ComplexVector f = problem.rhs().cast<Complex>();
    ComplexVector w = solve_shifted(problem.linear_matrix(), a, f);
    ComplexVector res = problem.linear_matrix() * w + a * w - f;
    return RegularizedSolveComplex{std::move(w), problem.norm(res), 1};
}

std::vector<double> default_path_moduli(double r0, double floor) {
    if (!(r0 > 0.0)) throw UsageError("path start radius must be positive");
    const double lo = std::max(floor, r0 * std::pow(2.0, -40));
    std::vector<double> out;
    for (double r = r0; r > lo; r *= 0.5) out.push_back(r);
    out.push_back(lo);
    return out;
}

RegularizedPath track_path(const OperatorProblem& problem, std::span<const double> a_moduli,
                           const Vector& w_start, const NewtonOptions& opt) {
    RegularizedPath path;
    if (a_moduli.empty()) return path;
    for (std::size_t i = 0; i < a_moduli.size(); ++i) {
        if (!(a_moduli[i] > 0.0)) throw UsageError("path moduli must be positive");
        if (i > 0 && !(a_moduli[i] < a_moduli[i - 1]))
            throw UsageError("path moduli must be strictly decreasing");
    }

    const double theta = problem.resolvent().theta;
    const Complex ray = std::polar(1.0, theta);
    const bool complex_path = theta != 0.0;

    Vector w = w_start;
    ComplexVector wc = w_start.cast<Complex>();
    for (double r : a_moduli) {
        const Complex a = ray * r;
        PathEntry entry;
        entry.a = a;
        try {
            if (complex_path) {
                RegularizedSolveComplex sol = solve_regularized(problem, a, wc, opt);
                wc = sol.w;
                entry.w_complex = sol.w;
                entry.residual = sol.residual;
                entry.newton_iters = sol.iters;
            } else {
                RegularizedSolve sol = solve_regularized(problem, r, w, opt);
                w = sol.w;
                entry.w = sol.w;
                entry.residual = sol.residual;
                entry.newton_iters = sol.iters;
            }
        } catch (const NoConvergenceError& e) {
            path.aborted = true;
            path.abort_reason = e.what();
            log::warn(std::string("path tracking aborted: ") + e.what());
            break;
        }
        if (!path.entries.empty()) {
            double step;
            if (complex_path)
                step = problem.norm(
                    ComplexVector(entry.w_complex - path.entries.back().w_complex));
            else
                step = problem.norm(Vector(entry.w - path.entries.back().w));
            if (!path.step_norms.empty() && step > path.step_norms.back() * (1.0 + 1e-12))
                path.cauchy_decreasing = false;
            path.step_norms.push_back(step);
        }
        const double wn = complex_path ? problem.norm(entry.w_complex) : problem.norm(entry.w);
        path.max_w_norm = std::max(path.max_w_norm, wn);
        path.entries.push_back(std::move(entry));
    }

    if (!path.entries.empty()) {
        if (complex_path)
            path.limit_estimate_complex = path.entries.back().w_complex;
        else
            path.limit_estimate = path.entries.back().w;
    }
    return path;
}

PathDerivativeReport path_derivative_check(const OperatorProblem& problem,
                                           const RegularizedPath& path,
                                           const Schedule& schedule) {
    PathDerivativeReport report;
    const std::size_t m = path.entries.size();
    if (m < 3) return report;
    if (problem.resolvent().theta != 0.0)
        throw UsageError("path derivative check runs on the real path");

    const double b = schedule.b();
    const double c1 = problem.resolvent().c1;
    const double c2 = schedule.c2();

    std::vector<double> times(m);
    for (std::size_t j = 0; j < m; ++j)
        times[j] = schedule.time_for_radius(std::abs(path.entries[j].a));

    for (std::size_t j = 1; j + 1 < m; ++j) {
        const PathEntry& e = path.entries[j];
        const double r = std::abs(e.a);
        const double t = times[j];
        const double rdot = schedule.rdot(t);
        PathDerivativeRow row;
        row.t = t;
        row.r = r;

        // adot = e^{i theta} rdot; on the real path wdot = -rdot A_a^{-1} w.
        Vector wdot = problem.apply_resolvent(e.w, r, e.w);
        wdot *= -rdot;
        row.analytic_norm = problem.norm(wdot);

        const double dt = times[j + 1] - times[j - 1];
        Vector fd = (path.entries[j + 1].w - path.entries[j - 1].w) / dt;
        row.fd_norm = problem.norm(fd);
        row.agreement_error = problem.norm(Vector(fd - wdot));
        // First-order agreement: the centered difference across a geometric
        // path step carries an O(|delta r| / r) relative error.
        const double dr = std::abs(std::abs(path.entries[j - 1].a) - std::abs(path.entries[j + 1].a));
        const double scale = std::max(row.analytic_norm, row.fd_norm);
        row.agree = row.agreement_error <= scale * (dr / r) + 1e-12;

        const double wn = problem.norm(e.w);
        row.bound_c1_ok =
            row.analytic_norm <= c1 * std::abs(rdot) * std::pow(r, -b) * wn * (1.0 + 1e-10);
        row.bound_c2_ok = row.analytic_norm <= c2 * std::abs(rdot) * std::pow(r, -b) * (1.0 + 1e-10);

        report.all_agree = report.all_agree && row.agree;
        report.bounds_pass = report.bounds_pass && row.bound_c1_ok && row.bound_c2_ok;
        report.rows.push_back(row);
    }
    return report;
}

NormalSolutionResult normal_solution(const Matrix& a_matrix, const Vector& f,
                                     std::span<const double> a_sequence) {
    if (a_matrix.rows() != f.size()) throw UsageError("normal solution: rhs dimension mismatch");
    for (std::size_t i = 0; i < a_sequence.size(); ++i) {
        if (!(a_sequence[i] > 0.0)) throw UsageError("normal solution shifts must be positive");
        if (i > 0 && !(a_sequence[i] < a_sequence[i - 1]))
            throw UsageError("normal solution shifts must decrease");
    }

    NormalSolutionResult out;
    const Matrix t_matrix = a_matrix.transpose() * a_matrix;
    const Vector atf = a_matrix.transpose() * f;
    Vector prev;
    for (double a : a_sequence) {
        Matrix shifted = t_matrix;
        shifted.diagonal().array() += a;
        Vector y = Eigen::LDLT<Matrix>(shifted).solve(atf);
        out.iterate_norms.push_back(y.norm());
        out.residual_norms.push_back((a_matrix * y - f).norm());
        if (prev.size() > 0) out.step_norms.push_back((y - prev).norm());
        prev = std::move(y);
    }
    if (prev.size() == 0) throw UsageError("normal solution needs at least one shift");
    out.y = std::move(prev);
    return out;
}

} // namespace dsm
