#include "vector_space.hpp"

#include <cmath>
#include <sstream>

#include "errors.hpp"

namespace dsm {

VectorSpace::VectorSpace(int dimension, NormKind kind, double p)
    : dimension_(dimension), kind_(kind), p_(kind == NormKind::L2 ? 2.0 : p) {
    if (dimension <= 0) throw UsageError("space dimension must be positive");
    if (kind_ == NormKind::Lp && !(p_ > 1.0 && std::isfinite(p_)))
        throw UsageError("l^p norm exponent must lie in (1, inf)");
}

double VectorSpace::norm(const Vector& v) const {
    check_dimension(v, "norm");
    if (kind_ == NormKind::L2) return v.norm();
    double s = 0.0;
    for (int i = 0; i < v.size(); ++i) s += std::pow(std::abs(v[i]), p_);
    return std::pow(s, 1.0 / p_);
}

double VectorSpace::norm(const ComplexVector& v) const {
    if (v.size() != dimension_) throw UsageError("norm: dimension mismatch");
    if (kind_ == NormKind::L2) return v.norm();
    double s = 0.0;
    for (int i = 0; i < v.size(); ++i) s += std::pow(std::abs(v[i]), p_);
    return std::pow(s, 1.0 / p_);
}

double VectorSpace::norm_rate(const Vector& w, const Vector& wdot) const {
    check_dimension(w, "norm_rate");
    check_dimension(wdot, "norm_rate");
    const double nw = norm(w);
    if (nw == 0.0)
        throw NondifferentiablePointError("norm is not differentiable at w = 0");
    if (kind_ == NormKind::L2) return w.dot(wdot) / nw;
    double s = 0.0;
    for (int i = 0; i < w.size(); ++i) {
        if (w[i] == 0.0) continue; // |w_i|^{p-1} -> 0 as w_i -> 0 for p > 1
        const double sign = w[i] > 0.0 ? 1.0 : -1.0;
        s += sign * std::pow(std::abs(w[i]), p_ - 1.0) * wdot[i];
    }
    return s / std::pow(nw, p_ - 1.0);
}

void VectorSpace::check_dimension(const Vector& v, const char* what) const {
    if (v.size() != dimension_) {
        std::ostringstream msg;
        msg << what << ": dimension mismatch (got " << v.size() << ", expected " << dimension_
            << ")";
        throw UsageError(msg.str());
    }
}

} // namespace dsm
