#include "operator_problem.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "errors.hpp"
#include "log.hpp"

namespace dsm {

void SmoothnessParams::validate() const {
    if (!(kappa > 0.0 && kappa <= 1.0)) throw UsageError("kappa must lie in (0, 1]");
    if (!(c0 >= 0.0)) throw UsageError("c0 must be nonnegative");
}

void ResolventParams::validate() const {
    if (!(c1 > 0.0)) throw UsageError("c1 must be positive");
    if (!(b > 0.0)) throw UsageError("b must be positive");
    if (!(eps0 > 0.0)) throw UsageError("eps0 must be positive");
}

const char* to_string(ConstantProvenance p) {
    switch (p) {
        case ConstantProvenance::Analytic: return "analytic";
        case ConstantProvenance::Asserted: return "asserted";
        case ConstantProvenance::Estimated: return "estimated";
    }
    return "unknown";
}

namespace {

void check_finite(const Vector& v, const char* what) {
    for (int i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i])) {
            std::ostringstream msg;
            msg << what << " produced a non-finite value at component " << i;
            throw EvaluationError(msg.str());
        }
    }
}

} // namespace

OperatorProblem::OperatorProblem(OperatorProblemConfig config)
    : space_(config.space),
      name_(std::move(config.name)),
      apply_(std::move(config.apply)),
      derivative_(std::move(config.derivative)),
      jacobian_(std::move(config.jacobian)),
      linear_matrix_(std::move(config.linear_matrix)),
      rhs_(std::move(config.rhs)),
      smoothness_(config.smoothness),
      resolvent_(config.resolvent),
      provenance_(config.provenance),
      known_solution_(std::move(config.known_solution)) {
    smoothness_.validate();
    resolvent_.validate();
    if (linear_matrix_) {
        if (linear_matrix_->rows() != dimension() || linear_matrix_->cols() != dimension())
            throw UsageError("linear matrix shape does not match the space dimension");
        if (!apply_) {
            const Matrix& m = *linear_matrix_;
            apply_ = [m](const Vector& u) { return Vector(m * u); };
        }
        if (!jacobian_) {
            const Matrix& m = *linear_matrix_;
            jacobian_ = [m](const Vector&) { return m; };
        }
    }
    if (!apply_) throw UsageError("operator problem needs an apply function");
    if (rhs_.size() != dimension()) throw UsageError("rhs dimension mismatch");
    if (known_solution_ && known_solution_->size() != dimension())
        throw UsageError("known solution dimension mismatch");
}

const Matrix& OperatorProblem::linear_matrix() const {
    if (!linear_matrix_) throw UsageError("problem is not linear");
    return *linear_matrix_;
}

Vector OperatorProblem::eval_apply(const Vector& u) const {
    space_.check_dimension(u, "eval F");
    Vector out = apply_(u);
    if (out.size() != dimension()) throw EvaluationError("F returned a wrong-sized vector");
    check_finite(out, "F");
    return out;
}

Vector OperatorProblem::apply_derivative(const Vector& u, const Vector& h) const {
    space_.check_dimension(u, "apply derivative");
    space_.check_dimension(h, "apply derivative");
    if (derivative_) {
        Vector out = derivative_(u, h);
        check_finite(out, "A(u)h");
        return out;
    }
    if (jacobian_) {
        Vector out = jacobian_(u) * h;
        check_finite(out, "A(u)h");
        return out;
    }
    const double hn = h.norm();
    if (hn == 0.0) return Vector::Zero(dimension());
    const double s = std::sqrt(std::numeric_limits<double>::epsilon()) * (1.0 + u.norm());
    Vector out = (eval_apply(u + (s / hn) * h) - eval_apply(u)) * (hn / s);
    check_finite(out, "A(u)h (finite difference)");
    return out;
}

Matrix OperatorProblem::jacobian_matrix(const Vector& u) const {
    space_.check_dimension(u, "jacobian");
    if (jacobian_) return jacobian_(u);
    const int n = dimension();
    Matrix m(n, n);
    Vector e = Vector::Zero(n);
    for (int j = 0; j < n; ++j) {
        e[j] = 1.0;
        m.col(j) = apply_derivative(u, e);
        e[j] = 0.0;
    }
    return m;
}

void OperatorProblem::check_shift(Complex a) const {
    const double r = std::abs(a);
    if (r == 0.0) throw UsageError("resolvent shift a must be nonzero");
    if (r >= resolvent_.eps0) {
        std::ostringstream msg;
        msg << "|a| = " << r << " is outside the path (eps0 = " << resolvent_.eps0 << ")";
        throw UsageError(msg.str());
    }
}

Vector OperatorProblem::apply_resolvent(const Vector& u, double a, const Vector& v) const {
    check_shift(Complex(a, 0.0));
    space_.check_dimension(u, "apply resolvent");
    space_.check_dimension(v, "apply resolvent");
    check_finite(v, "resolvent right side");
    return solve_shifted(jacobian_matrix(u), a, v);
}

ComplexVector OperatorProblem::apply_resolvent(const Vector& u, Complex a,
                                               const ComplexVector& v) const {
    check_shift(a);
    space_.check_dimension(u, "apply resolvent");
    if (v.size() != dimension()) throw UsageError("apply resolvent: dimension mismatch");
    if (a.imag() == 0.0 && v.imag().isZero(0.0)) {
        Vector re = apply_resolvent(u, a.real(), Vector(v.real()));
        return re.cast<Complex>();
    }
    return solve_shifted(jacobian_matrix(u), a, v);
}

HolderEstimate estimate_holder_constants(const OperatorProblem& problem, int samples,
                                         double radius, const Vector& center,
                                         std::uint64_t seed) {
    if (samples < 10) throw UsageError("holder estimation needs at least 10 samples");
    if (!(radius > 0.0)) throw UsageError("holder estimation needs a positive radius");
    problem.space().check_dimension(center, "holder estimation");

    CounterRng rng(seed, 0x484f4c44UL); // stream tag for this estimator
    const int n = problem.dimension();
    std::vector<double> logd, lognum;
    int usable = 0;
    int nonzero = 0;
    for (int i = 0; i < samples; ++i) {
        // Pairs at log-spaced scales inside the ball: the exponent is a
        // scaling law, so the fit needs pair separations spanning decades.
        const double scale = radius * std::pow(10.0, rng.uniform(-6.0, 0.0));
        Vector u = rng.in_ball(n, scale, center);
        Vector v = rng.in_ball(n, scale, center);
        const double d = problem.norm(Vector(u - v));
        if (d < 1e-13) continue;
        ++usable;
        const double num = operator_norm(problem.jacobian_matrix(u) - problem.jacobian_matrix(v));
        if (num < 1e-13) continue;
        ++nonzero;
        logd.push_back(std::log(d));
        lognum.push_back(std::log(num));
    }
    if (usable == 0)
        throw DegenerateSampleError("all sampled point pairs coincide to 1e-13; enlarge the radius");
    if (nonzero == 0) {
        // Constant derivative: any kappa works with c0 = 0; kappa = 1 gives
        // the strongest schedule.
        return HolderEstimate{0.0, 1.0, usable};
    }

    const auto m = static_cast<double>(logd.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < logd.size(); ++i) {
        sx += logd[i];
        sy += lognum[i];
        sxx += logd[i] * logd[i];
        sxy += logd[i] * lognum[i];
    }
    const double denom = m * sxx - sx * sx;
    double slope = denom != 0.0 ? (m * sxy - sx * sy) / denom : 1.0;
    double intercept = (sy - slope * sx) / m;
    const double kappa = std::min(1.0, std::max(slope, 1e-6));
    // Envelope constant: shift the line so c0 ||u-v||^kappa majorizes every
    // sample, since c0 is defined by an inequality.
    double shift = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < logd.size(); ++i)
        shift = std::max(shift, lognum[i] - kappa * logd[i] - intercept);
    return HolderEstimate{std::exp(intercept + shift), kappa, static_cast<int>(m)};
}

ResolventBoundReport verify_resolvent_bound(const OperatorProblem& problem, const Vector& u,
                                            const std::vector<double>& r_grid) {
    const ResolventParams& rp = problem.resolvent();
    for (double r : r_grid)
        if (!(r > 0.0 && r < rp.eps0))
            throw UsageError("resolvent bound grid values must lie in (0, eps0)");

    ResolventBoundReport report;
    report.c1 = rp.c1;
    report.b = rp.b;
    const Matrix a_matrix = problem.jacobian_matrix(u);
    const Complex ray = std::polar(1.0, rp.theta);
    const bool real_ray = rp.theta == 0.0;
    for (double r : r_grid) {
        ResolventBoundRow row;
        row.r = r;
        double smin;
        if (real_ray) {
            Matrix shifted = a_matrix;
            shifted.diagonal().array() += r;
            smin = smallest_singular_value(shifted);
        } else {
            ComplexMatrix shifted = a_matrix.cast<Complex>();
            shifted.diagonal().array() += ray * r;
            smin = smallest_singular_value(shifted);
        }
        if (smin <= 0.0) {
            row.singular = true;
            row.inverse_norm = std::numeric_limits<double>::infinity();
            row.product = std::numeric_limits<double>::infinity();
            ++report.singular_count;
        } else {
            row.inverse_norm = 1.0 / smin;
            row.product = row.inverse_norm * std::pow(r, rp.b);
            report.max_product = std::max(report.max_product, row.product);
        }
        report.rows.push_back(row);
    }
    report.pass =
        report.singular_count == 0 && report.max_product <= rp.c1 * (1.0 + 1e-8);
    return report;
}

ResolventEstimate estimate_resolvent_constants(const OperatorProblem& problem, const Vector& u,
                                               const std::vector<double>& r_grid) {
    if (r_grid.size() < 2) throw UsageError("resolvent estimation needs at least 2 grid points");
    const Matrix a_matrix = problem.jacobian_matrix(u);
    const Complex ray = std::polar(1.0, problem.resolvent().theta);
    std::vector<double> logr, lognorm;
    for (double r : r_grid) {
        if (!(r > 0.0)) throw UsageError("resolvent estimation grid must be positive");
        ComplexMatrix shifted = a_matrix.cast<Complex>();
        shifted.diagonal().array() += ray * r;
        const double smin = smallest_singular_value(shifted);
        if (smin <= 0.0) continue;
        logr.push_back(std::log(r));
        lognorm.push_back(-std::log(smin));
    }
    if (logr.size() < 2)
        throw DegenerateSampleError("resolvent estimation: too many singular grid points");
    const auto m = static_cast<double>(logr.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < logr.size(); ++i) {
        sx += logr[i];
        sy += lognorm[i];
        sxx += logr[i] * logr[i];
        sxy += logr[i] * lognorm[i];
    }
    const double denom = m * sxx - sx * sx;
    double slope = denom != 0.0 ? (m * sxy - sx * sy) / denom : -1.0;
    double b = std::max(-slope, 1e-3);
    double intercept = (sy - slope * sx) / m;
    double shift = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < logr.size(); ++i)
        shift = std::max(shift, lognorm[i] + b * logr[i] - intercept);
    ResolventEstimate est;
    est.b = b;
    est.c1 = std::exp(intercept + shift);
    return est;
}

} // namespace dsm
