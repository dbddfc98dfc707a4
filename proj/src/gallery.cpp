#include "gallery.hpp"

#include <cmath>
#include <sstream>

#include "errors.hpp"
#include "rng.hpp"

namespace dsm {

std::vector<std::string> gallery_names() {
    return {"wellposed-linear", "illposed-kernel", "rank-deficient-linear", "monotone-holder",
            "monotone-smooth"};
}

namespace {

constexpr double gallery_eps0 = 1e3;

Vector alternating_solution(int n, double scale) {
    Vector y(n);
    for (int i = 0; i < n; ++i) y[i] = (i % 2 == 0) ? scale : -scale;
    return y;
}

Matrix spd_matrix(int n, double cond, CounterRng& rng) {
    Vector eigs(n);
    if (n == 1) {
        eigs[0] = std::sqrt(cond);
    } else {
        for (int i = 0; i < n; ++i)
            eigs[i] = std::pow(cond, static_cast<double>(i) / (n - 1));
    }
    Matrix q = random_orthogonal(n, rng);
    return q * eigs.asDiagonal() * q.transpose();
}

OperatorProblem make_wellposed_linear(const GalleryParams& p) {
    CounterRng rng(p.seed, 0x57454c4cUL);
    Matrix m = spd_matrix(p.n, p.cond, rng);
    Vector y = alternating_solution(p.n, p.y_scale);
    OperatorProblemConfig cfg{VectorSpace(p.n, p.norm_kind, p.p_norm)};
    cfg.name = "wellposed-linear";
    cfg.linear_matrix = m;
    cfg.rhs = m * y;
    cfg.known_solution = y;
    cfg.smoothness = {0.0, 1.0};
    cfg.resolvent = {1.0, 1.0, gallery_eps0, p.theta};
    cfg.provenance = ConstantProvenance::Analytic;
    return OperatorProblem(std::move(cfg));
}

// Midpoint Galerkin matrix of the smooth kernel exp(-(s-t)^2) on [0,1]^2.
// Gram matrix of a Gaussian kernel: symmetric positive definite with a
// rapidly decaying spectrum, i.e. numerically ill-posed for moderate n.
Matrix kernel_matrix(int n) {
    const double h = 1.0 / n;
    Matrix k(n, n);
    for (int i = 0; i < n; ++i) {
        const double s = (i + 0.5) * h;
        for (int j = 0; j < n; ++j) {
            const double t = (j + 0.5) * h;
            k(i, j) = h * h * std::exp(-(s - t) * (s - t));
        }
    }
    return k;
}

OperatorProblem make_illposed_kernel(const GalleryParams& p) {
    if (p.n > 64) throw UsageError("illposed-kernel supports n <= 64");
    Matrix k = kernel_matrix(p.n);
    Vector y(p.n);
    for (int i = 0; i < p.n; ++i) y[i] = p.y_scale * std::sin(M_PI * (i + 0.5) / p.n);
    OperatorProblemConfig cfg{VectorSpace(p.n, p.norm_kind, p.p_norm)};
    cfg.name = "illposed-kernel";
    cfg.linear_matrix = k;
    cfg.rhs = k * y;
    cfg.known_solution = y;
    cfg.smoothness = {0.0, 1.0};
    cfg.resolvent = {1.0, 1.0, gallery_eps0, p.theta};
    cfg.provenance = ConstantProvenance::Analytic;
    return OperatorProblem(std::move(cfg));
}

OperatorProblem make_rank_deficient(const GalleryParams& p) {
    RankDeficientFactors fac = rank_deficient_factors(p);
    Matrix a = fac.u * fac.sigma.asDiagonal() * fac.v.transpose();
    Vector f = a * fac.x0;
    // Minimal-norm solution from the construction factors.
    const int n = p.n;
    Vector y = Vector::Zero(n);
    for (int i = 0; i < n; ++i) {
        if (fac.sigma[i] == 0.0) continue;
        y += (fac.u.col(i).dot(f) / fac.sigma[i]) * fac.v.col(i);
    }
    OperatorProblemConfig cfg{VectorSpace(n, p.norm_kind, p.p_norm)};
    cfg.name = "rank-deficient-linear";
    cfg.linear_matrix = a;
    cfg.rhs = f;
    cfg.known_solution = y;
    cfg.smoothness = {0.0, 1.0};
    // Constants refer to the monotone reduction A^T A used by the
    // normal-solution iteration.
    cfg.resolvent = {1.0, 1.0, gallery_eps0, p.theta};
    cfg.provenance = ConstantProvenance::Analytic;
    return OperatorProblem(std::move(cfg));
}

OperatorProblem make_monotone_holder(const GalleryParams& p) {
    const double kappa = p.kappa;
    if (!(kappa > 0.0 && kappa <= 1.0)) throw UsageError("monotone-holder needs kappa in (0, 1]");
    auto apply = [kappa](const Vector& u) {
        Vector out(u.size());
        for (int i = 0; i < u.size(); ++i)
            out[i] = u[i] + u[i] * std::pow(std::abs(u[i]), kappa);
        return out;
    };
    auto jac = [kappa](const Vector& u) {
        Matrix m = Matrix::Zero(u.size(), u.size());
        for (int i = 0; i < u.size(); ++i)
            m(i, i) = 1.0 + (1.0 + kappa) * std::pow(std::abs(u[i]), kappa);
        return m;
    };
    Vector y = alternating_solution(p.n, p.y_scale);
    OperatorProblemConfig cfg{VectorSpace(p.n, p.norm_kind, p.p_norm)};
    cfg.name = "monotone-holder";
    cfg.apply = apply;
    cfg.jacobian = jac;
    cfg.rhs = apply(y);
    cfg.known_solution = y;
    cfg.smoothness = {1.0 + kappa, kappa};
    cfg.resolvent = {1.0, 1.0, gallery_eps0, p.theta};
    cfg.provenance = ConstantProvenance::Analytic;
    return OperatorProblem(std::move(cfg));
}

OperatorProblem make_monotone_smooth(const GalleryParams& p) {
    CounterRng rng(p.seed, 0x534d4f4fUL);
    Matrix m = spd_matrix(p.n, p.cond, rng);
    const double eps = p.eps;
    auto apply = [m, eps](const Vector& u) {
        Vector out = m * u;
        for (int i = 0; i < u.size(); ++i) out[i] += eps * std::tanh(u[i]);
        return out;
    };
    auto jac = [m, eps](const Vector& u) {
        Matrix j = m;
        for (int i = 0; i < u.size(); ++i) {
            const double c = std::cosh(u[i]);
            j(i, i) += eps / (c * c);
        }
        return j;
    };
    Vector y = alternating_solution(p.n, p.y_scale);
    OperatorProblemConfig cfg{VectorSpace(p.n, p.norm_kind, p.p_norm)};
    cfg.name = "monotone-smooth";
    cfg.apply = apply;
    cfg.jacobian = jac;
    cfg.rhs = apply(y);
    cfg.known_solution = y;
    // max |(sech^2)'| = 4/(3 sqrt(3)).
    cfg.smoothness = {eps * 4.0 / (3.0 * std::sqrt(3.0)), 1.0};
    cfg.resolvent = {1.0, 1.0, gallery_eps0, p.theta};
    cfg.provenance = ConstantProvenance::Analytic;
    return OperatorProblem(std::move(cfg));
}

} // namespace

RankDeficientFactors rank_deficient_factors(const GalleryParams& p) {
    const int n = p.n;
    const int rank = p.rank < 0 ? std::max(1, n - 2) : p.rank;
    if (rank < 1 || rank > n) throw UsageError("rank must lie in [1, n]");
    CounterRng rng(p.seed, 0x52414e4bUL);
    RankDeficientFactors fac;
    fac.u = random_orthogonal(n, rng);
    fac.v = random_orthogonal(n, rng);
    fac.sigma = Vector::Zero(n);
    for (int i = 0; i < rank; ++i) {
        fac.sigma[i] = rank == 1 ? std::sqrt(0.5 * 2.0)
                                 : 0.5 * std::pow(4.0, static_cast<double>(i) / (rank - 1));
    }
    fac.x0 = rng.normal_vector(n);
    return fac;
}

OperatorProblem make_gallery(const std::string& name, const GalleryParams& params) {
    if (params.n <= 0) throw UsageError("gallery dimension must be positive");
    if (name == "wellposed-linear") return make_wellposed_linear(params);
    if (name == "illposed-kernel") return make_illposed_kernel(params);
    if (name == "rank-deficient-linear") return make_rank_deficient(params);
    if (name == "monotone-holder") return make_monotone_holder(params);
    if (name == "monotone-smooth") return make_monotone_smooth(params);
    std::ostringstream msg;
    msg << "unknown gallery problem '" << name << "'; available:";
    for (const std::string& g : gallery_names()) msg << " " << g;
    throw UsageError(msg.str());
}

} // namespace dsm
