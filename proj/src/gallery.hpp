#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "operator_problem.hpp"

namespace dsm {

struct GalleryParams {
    int n = 16;
    double kappa = 1.0;   // monotone-holder exponent
    double cond = 4.0;    // spectrum spread of the linear kinds
    int rank = -1;        // rank-deficient-linear; default n - 2
    double y_scale = 1.0; // magnitude of the built-in solution
    double eps = 0.1;     // smooth perturbation size (monotone-smooth)
    std::uint64_t seed = 1;
    NormKind norm_kind = NormKind::L2;
    double p_norm = 2.0;
    double theta = 0.0;
};

std::vector<std::string> gallery_names();

// Problem kinds:
//   wellposed-linear      symmetric positive definite M, F(u) = M u
//   illposed-kernel       Galerkin matrix of the kernel exp(-(s-t)^2) on [0,1]
//   rank-deficient-linear U diag(sigma, 0...) V^T with a chosen spectrum
//   monotone-holder       F(u)_i = u_i + u_i |u_i|^kappa  (c0 = 1+kappa)
//   monotone-smooth       F(u) = M u + eps tanh(u)
// Each carries analytic constants and a known solution with f = F(y)
// assembled exactly.
OperatorProblem make_gallery(const std::string& name, const GalleryParams& params = {});

// Construction inputs of rank-deficient-linear, for oracles that need the
// exact factors rather than a numeric decomposition of the product.
struct RankDeficientFactors {
    Matrix u;
    Matrix v;
    Vector sigma; // length n; zeros beyond the rank
    Vector x0;    // f = A x0
};

RankDeficientFactors rank_deficient_factors(const GalleryParams& params);

} // namespace dsm
