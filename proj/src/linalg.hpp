#pragma once

#include <complex>

#include <Eigen/Core>

#include "rng.hpp"

namespace dsm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

// Spectral norm (largest singular value).
double operator_norm(const Matrix& m);

double smallest_singular_value(const Matrix& m);
double smallest_singular_value(const ComplexMatrix& m);

// Solves (A + a I) x = v by dense LU with partial pivoting plus one step of
// iterative refinement. Throws ResolventSingularError when the factorization
// detects singularity to machine precision; cond_out (optional) receives the
// pivot-ratio condition estimate.
Vector solve_shifted(const Matrix& a_matrix, double shift, const Vector& v,
                     double* cond_out = nullptr);
ComplexVector solve_shifted(const Matrix& a_matrix, Complex shift, const ComplexVector& v,
                            double* cond_out = nullptr);

// Random orthogonal matrix via QR of a Gaussian matrix, with the sign fix
// that makes the factor unique (positive R diagonal).
Matrix random_orthogonal(int n, CounterRng& rng);

} // namespace dsm
