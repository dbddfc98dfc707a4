#pragma once

#include <functional>
#include <vector>

#include "schedule.hpp"

namespace dsm {

using ScalarFn = std::function<double(double)>;
using ScalarFn2 = std::function<double(double, double)>; // (t, g)

// Data of the differential inequality
//   gdot <= -gamma(t) g + alpha(t, g) + beta(t)
// together with a candidate majorant mu(t) > 0 and the horizon/grid the
// certificate is evaluated on.
struct InequalityInstance {
    ScalarFn gamma;
    ScalarFn2 alpha;   // locally Lipschitz in g
    ScalarFn beta;
    ScalarFn mu;       // > 0
    ScalarFn mu_dot;   // optional; central differences when absent
    double g0 = 0.0;
    double horizon = 1.0;
    std::vector<double> grid; // strictly increasing, covering [0, horizon]

    void validate() const;
};

// alpha(t, g) = alpha_t(t) g^p, the specialization the theory is applied with.
InequalityInstance make_power_law_instance(ScalarFn gamma, ScalarFn alpha_t, double p,
                                           ScalarFn beta, ScalarFn mu, double g0, double horizon,
                                           std::vector<double> grid);

// The derived-schedule instance: gamma = 1, alpha(t,g) = c3 r^{-b} g^p,
// beta = c2 |rdot| r^{-b}, mu = lambda r^{-k}.
InequalityInstance schedule_instance(const Schedule& schedule, double g0, double horizon,
                                     std::vector<double> grid);

struct LemmaConfig {
    double tol_cert = 1e-8;    // scale of the certification slack
    double blowup = 1e12;      // finite-time blow-up sentinel for phi
    double rel_tol = 1e-10;    // phi integration accuracy
    double abs_tol = 1e-14;
};

struct ConditionReport {
    double condition9_margin = 0.0; // min over grid+midpoints of the majorant slack
    bool condition10_ok = false;    // mu(0) g(0) <= 1
    double worst_t = 0.0;
};

// Pointwise check of alpha(t, mu^{-1}) + beta <= mu^{-1} (gamma - mudot/mu)
// on the grid plus midpoints, and of mu(0) g0 <= 1.
ConditionReport check_conditions(const InequalityInstance& instance,
                                 const LemmaConfig& config = {});

struct PhiTrajectory {
    std::vector<double> t;
    std::vector<double> phi;
    bool blew_up = false;
    double blowup_time = 0.0;
};

// Integrates phidot = -gamma phi + alpha(t, phi) + beta, phi(0) = g0, and
// reports phi on the instance grid. Blow-up (phi beyond the sentinel) is a
// reported outcome, not an error; it can only occur when the conditions fail.
PhiTrajectory integrate_phi(const InequalityInstance& instance, const LemmaConfig& config = {});

struct Certificate {
    double condition9_margin = 0.0;
    bool condition10_ok = false;
    bool sandwich_ok = false;
    double max_violation = 0.0;
    double worst_t = 0.0;
    bool phi_blew_up = false;
    bool passed(double tol_cert = 1e-8) const {
        return condition9_margin >= -tol_cert && condition10_ok && sandwich_ok;
    }
};

// Verifies g(t) <= phi(t) and phi(t) <= mu^{-1}(t) on the grid, with slack
// tol_cert (1 + mu^{-1}(t)) pointwise. g_samples must match the grid length.
Certificate verify_sandwich(const std::vector<double>& g_samples,
                            const InequalityInstance& instance, const LemmaConfig& config = {},
                            const PhiTrajectory* phi = nullptr);

} // namespace dsm
