#pragma once

#include "linalg.hpp"

namespace dsm {

enum class NormKind { L2, Lp };

// Finite-dimensional coordinate space with an l2 or l^p norm, p in (1, inf).
// Both norms are Gateaux differentiable away from 0, which is what makes the
// norm rate d||w(t)||/dt well defined along trajectories.
class VectorSpace {
public:
    explicit VectorSpace(int dimension, NormKind kind = NormKind::L2, double p = 2.0);

    int dimension() const noexcept { return dimension_; }
    NormKind kind() const noexcept { return kind_; }
    double exponent() const noexcept { return p_; }

    double norm(const Vector& v) const;
    double norm(const ComplexVector& v) const; // componentwise modulus

    // Gateaux derivative of the norm at w in direction wdot. Throws
    // NondifferentiablePointError at w = 0. Satisfies |rate| <= ||wdot||.
    double norm_rate(const Vector& w, const Vector& wdot) const;

    void check_dimension(const Vector& v, const char* what) const;

private:
    int dimension_;
    NormKind kind_;
    double p_;
};

} // namespace dsm
