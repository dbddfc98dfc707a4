#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "vector_space.hpp"

namespace dsm {

// Holder continuity of the derivative: ||A(u) - A(v)|| <= c0 ||u - v||^kappa.
struct SmoothnessParams {
    double c0 = 0.0;
    double kappa = 1.0;
    void validate() const;
};

// Resolvent growth along the ray a = e^{i theta} r:
// ||(A(u) + aI)^{-1}|| <= c1 / |a|^b for 0 < |a| < eps0.
struct ResolventParams {
    double c1 = 1.0;
    double b = 1.0;
    double eps0 = 1.0;
    double theta = 0.0;
    void validate() const;
};

enum class ConstantProvenance { Analytic, Asserted, Estimated };

const char* to_string(ConstantProvenance p);

struct OperatorProblemConfig {
    VectorSpace space;
    std::string name;
    std::function<Vector(const Vector&)> apply;                      // F(u)
    std::function<Vector(const Vector&, const Vector&)> derivative;  // A(u) h, optional
    std::function<Matrix(const Vector&)> jacobian;                   // dense A(u), optional
    std::optional<Matrix> linear_matrix;  // set when F(u) = M u exactly
    Vector rhs;                           // f
    SmoothnessParams smoothness;
    ResolventParams resolvent;
    ConstantProvenance provenance = ConstantProvenance::Asserted;
    std::optional<Vector> known_solution; // y with F(y) = f
};

// Immutable after construction; all members are const-qualified reads, so a
// problem may be shared by concurrent readers.
class OperatorProblem {
public:
    explicit OperatorProblem(OperatorProblemConfig config);

    const VectorSpace& space() const noexcept { return space_; }
    int dimension() const noexcept { return space_.dimension(); }
    const std::string& name() const noexcept { return name_; }
    const Vector& rhs() const noexcept { return rhs_; }
    const SmoothnessParams& smoothness() const noexcept { return smoothness_; }
    const ResolventParams& resolvent() const noexcept { return resolvent_; }
    ConstantProvenance provenance() const noexcept { return provenance_; }
    const std::optional<Vector>& known_solution() const noexcept { return known_solution_; }
    bool is_linear() const noexcept { return linear_matrix_.has_value(); }
    const Matrix& linear_matrix() const;

    // F(u); checks the input dimension and that the output is finite.
    Vector eval_apply(const Vector& u) const;

    // A(u) h. Falls back to a directional forward difference with step
    // sqrt(eps) (1 + ||u||) when no derivative was supplied.
    Vector apply_derivative(const Vector& u, const Vector& h) const;

    // A(u) as a dense matrix, for factorization.
    Matrix jacobian_matrix(const Vector& u) const;

    // h with (A(u) + aI) h = v. Requires a != 0 and |a| < eps0.
    Vector apply_resolvent(const Vector& u, double a, const Vector& v) const;
    ComplexVector apply_resolvent(const Vector& u, Complex a, const ComplexVector& v) const;

    double norm(const Vector& v) const { return space_.norm(v); }
    double norm(const ComplexVector& v) const { return space_.norm(v); }

private:
    void check_shift(Complex a) const;

    VectorSpace space_;
    std::string name_;
    std::function<Vector(const Vector&)> apply_;
    std::function<Vector(const Vector&, const Vector&)> derivative_;
    std::function<Matrix(const Vector&)> jacobian_;
    std::optional<Matrix> linear_matrix_;
    Vector rhs_;
    SmoothnessParams smoothness_;
    ResolventParams resolvent_;
    ConstantProvenance provenance_;
    std::optional<Vector> known_solution_;
};

struct HolderEstimate {
    double c0 = 0.0;
    double kappa = 1.0;
    int pairs_used = 0;
};

// Fits log||A(u)-A(v)||_op against log||u-v|| on random pairs in the ball of
// the given radius about center. The returned c0 is the envelope constant:
// the fitted line is shifted up so every sample lies on or below it. The
// all-zero (constant-derivative) case returns (0, 1) by convention.
HolderEstimate estimate_holder_constants(const OperatorProblem& problem, int samples,
                                         double radius, const Vector& center,
                                         std::uint64_t seed);

struct ResolventBoundRow {
    double r = 0.0;
    double inverse_norm = 0.0; // ||(A(u) + aI)^{-1}||, exact via SVD
    double product = 0.0;      // inverse_norm * r^b
    bool singular = false;
};

struct ResolventBoundReport {
    std::vector<ResolventBoundRow> rows;
    double max_product = 0.0;
    double c1 = 0.0;
    double b = 0.0;
    int singular_count = 0;
    bool pass = false;
};

// Checks ||(A(u) + e^{i theta} r I)^{-1}|| r^b <= c1 (1 + 1e-8) over the grid.
// Singular shifted matrices become failed rows, not exceptions.
ResolventBoundReport verify_resolvent_bound(const OperatorProblem& problem, const Vector& u,
                                            const std::vector<double>& r_grid);

struct ResolventEstimate {
    double c1 = 1.0;
    double b = 1.0;
};

// Envelope fit of log||(A+aI)^{-1}|| against -log r on the grid; used when a
// problem ships without asserted resolvent constants.
ResolventEstimate estimate_resolvent_constants(const OperatorProblem& problem, const Vector& u,
                                               const std::vector<double>& r_grid);

} // namespace dsm
