#include "linalg.hpp"

#include <limits>
#include <sstream>

#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "errors.hpp"

namespace dsm {

double operator_norm(const Matrix& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

double smallest_singular_value(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(svd.singularValues().size() - 1);
}

double smallest_singular_value(const ComplexMatrix& m) {
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    return svd.singularValues()(svd.singularValues().size() - 1);
}

namespace {

template <typename MatrixT, typename VectorT>
VectorT solve_shifted_impl(const MatrixT& shifted, double a_abs, const VectorT& v,
                           double* cond_out) {
    Eigen::PartialPivLU<MatrixT> lu(shifted);
    const auto pivots = lu.matrixLU().diagonal();
    double max_piv = 0.0;
    double min_piv = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < pivots.size(); ++i) {
        const double p = std::abs(pivots(i));
        max_piv = std::max(max_piv, p);
        min_piv = std::min(min_piv, p);
    }
    const double eps = std::numeric_limits<double>::epsilon();
    if (min_piv <= eps * static_cast<double>(shifted.rows()) * max_piv) {
        const double cond = (min_piv > 0.0) ? max_piv / min_piv
                                            : std::numeric_limits<double>::infinity();
        if (cond_out) *cond_out = cond;
        std::ostringstream msg;
        msg << "shifted operator A + aI is singular to machine precision at |a|=" << a_abs
            << " (condition estimate " << cond << "); increase r(0)";
        throw ResolventSingularError(a_abs, cond, msg.str());
    }
    if (cond_out) *cond_out = max_piv / min_piv;

    VectorT x = lu.solve(v);
    // One refinement pass keeps the residual near machine precision even for
    // poorly conditioned shifts.
    VectorT res = v - shifted * x;
    if (res.norm() > 1e-15 * (1.0 + v.norm())) x += lu.solve(res);
    return x;
}

} // namespace

Vector solve_shifted(const Matrix& a_matrix, double shift, const Vector& v, double* cond_out) {
    Matrix shifted = a_matrix;
    shifted.diagonal().array() += shift;
    return solve_shifted_impl<Matrix, Vector>(shifted, std::abs(shift), v, cond_out);
}

ComplexVector solve_shifted(const Matrix& a_matrix, Complex shift, const ComplexVector& v,
                            double* cond_out) {
    ComplexMatrix shifted = a_matrix.cast<Complex>();
    shifted.diagonal().array() += shift;
    return solve_shifted_impl<ComplexMatrix, ComplexVector>(shifted, std::abs(shift), v, cond_out);
}

Matrix random_orthogonal(int n, CounterRng& rng) {
    Matrix g = rng.normal_matrix(n, n);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j)
        if (r(j, j) < 0) q.col(j) *= -1.0;
    return q;
}

} // namespace dsm
