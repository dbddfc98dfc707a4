#include "comparison.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "errors.hpp"
#include "ode.hpp"

namespace dsm {

void InequalityInstance::validate() const {
    if (!gamma || !alpha || !beta || !mu) throw UsageError("inequality instance is incomplete");
    if (!(g0 >= 0.0)) throw UsageError("g0 must be nonnegative");
    if (!(horizon > 0.0)) throw UsageError("horizon must be positive");
    if (grid.size() < 2) throw UsageError("grid needs at least two points");
    if (grid.front() != 0.0) throw UsageError("grid must start at t = 0");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw UsageError("grid must be strictly increasing");
    if (grid.back() > horizon * (1.0 + 1e-12)) throw UsageError("grid exceeds the horizon");
}

InequalityInstance make_power_law_instance(ScalarFn gamma, ScalarFn alpha_t, double p,
                                           ScalarFn beta, ScalarFn mu, double g0, double horizon,
                                           std::vector<double> grid) {
    if (!(p > 1.0)) throw UsageError("power-law exponent must exceed 1");
    InequalityInstance inst;
    inst.gamma = std::move(gamma);
    ScalarFn at = std::move(alpha_t);
    inst.alpha = [at, p](double t, double g) { return at(t) * std::pow(std::abs(g), p); };
    inst.beta = std::move(beta);
    inst.mu = std::move(mu);
    inst.g0 = g0;
    inst.horizon = horizon;
    inst.grid = std::move(grid);
    return inst;
}

InequalityInstance schedule_instance(const Schedule& s, double g0, double horizon,
                                     std::vector<double> grid) {
    InequalityInstance inst;
    inst.gamma = [](double) { return 1.0; };
    const double c3 = s.c3();
    const double c2 = s.c2();
    const double b = s.b();
    const double p = s.p();
    const double k = s.k();
    const double lambda = s.lambda();
    inst.alpha = [s, c3, b, p](double t, double g) {
        return c3 * std::pow(s.r(t), -b) * std::pow(std::abs(g), p);
    };
    inst.beta = [s, c2, b](double t) { return c2 * std::abs(s.rdot(t)) * std::pow(s.r(t), -b); };
    inst.mu = [s, lambda, k](double t) { return lambda * std::pow(s.r(t), -k); };
    inst.mu_dot = [s, lambda, k](double t) {
        return -k * lambda * std::pow(s.r(t), -k - 1.0) * s.rdot(t);
    };
    inst.g0 = g0;
    inst.horizon = horizon;
    inst.grid = std::move(grid);
    return inst;
}

namespace {

double check_point(const InequalityInstance& inst, double t) {
    const double mu = inst.mu(t);
    if (!(mu > 0.0)) {
        std::ostringstream msg;
        msg << "mu(t) must stay positive; got " << mu << " at t = " << t;
        throw EvaluationError(msg.str());
    }
    double mudot;
    if (inst.mu_dot) {
        mudot = inst.mu_dot(t);
    } else {
        const double h = 1e-6 * (1.0 + std::abs(t));
        const double tl = std::max(0.0, t - h);
        mudot = (inst.mu(t + h) - inst.mu(tl)) / (t + h - tl);
    }
    const double inv = 1.0 / mu;
    const double value = inv * (inst.gamma(t) - mudot * inv) - inst.alpha(t, inv) - inst.beta(t);
    if (!std::isfinite(value)) {
        std::ostringstream msg;
        msg << "non-finite condition value at t = " << t;
        throw EvaluationError(msg.str());
    }
    return value;
}

} // namespace

ConditionReport check_conditions(const InequalityInstance& inst, const LemmaConfig&) {
    inst.validate();
    ConditionReport report;
    report.condition9_margin = std::numeric_limits<double>::infinity();
    auto visit = [&](double t) {
        const double margin = check_point(inst, t);
        if (margin < report.condition9_margin) {
            report.condition9_margin = margin;
            report.worst_t = t;
        }
    };
    for (std::size_t i = 0; i < inst.grid.size(); ++i) {
        visit(inst.grid[i]);
        if (i + 1 < inst.grid.size()) visit(0.5 * (inst.grid[i] + inst.grid[i + 1]));
    }
    report.condition10_ok = inst.mu(0.0) * inst.g0 <= 1.0 + 1e-12;
    return report;
}

PhiTrajectory integrate_phi(const InequalityInstance& inst, const LemmaConfig& config) {
    inst.validate();
    PhiTrajectory traj;
    traj.t.reserve(inst.grid.size());
    traj.phi.reserve(inst.grid.size());

    OdeOptions opt;
    opt.rel_tol = config.rel_tol;
    opt.abs_tol = config.abs_tol;
    opt.initial_step = std::min(1e-3, inst.grid.back() / 100.0);
    opt.blowup_norm = config.blowup;

    OdeRhs rhs = [&inst](double t, const Vector& y) {
        Vector dy(1);
        dy[0] = -inst.gamma(t) * y[0] + inst.alpha(t, y[0]) + inst.beta(t);
        return dy;
    };

    std::size_t next = 0;
    OdeObserver observer = [&](const OdeStep& step) {
        while (next < inst.grid.size() &&
               std::abs(step.t - inst.grid[next]) <=
                   1e-12 * std::max(1.0, std::abs(inst.grid[next]))) {
            traj.t.push_back(inst.grid[next]);
            traj.phi.push_back((*step.y)[0]);
            ++next;
        }
        return true;
    };

    Vector y0(1);
    y0[0] = inst.g0;
    std::vector<double> forced(inst.grid.begin(), inst.grid.end());
    OdeResult run = integrate_ode(rhs, 0.0, y0, inst.grid.back(), opt, forced, observer);
    // A finite-time singularity shows up either as the sentinel crossing or
    // as step collapse against a solution already beyond any majorant scale.
    const double final_mag = run.y_end.size() > 0 ? std::abs(run.y_end[0]) : 0.0;
    const bool escaped = (run.status == OdeStatus::StepUnderflow ||
                          run.status == OdeStatus::RhsFailure) &&
                         final_mag >= 1e6;
    if (run.status == OdeStatus::BlowUp || escaped) {
        traj.blew_up = true;
        traj.blowup_time = run.t_end;
    } else if (run.status != OdeStatus::Done && run.status != OdeStatus::ObserverStop) {
        throw EvaluationError("phi integration failed: " + run.message);
    }
    return traj;
}

Certificate verify_sandwich(const std::vector<double>& g_samples,
                            const InequalityInstance& inst, const LemmaConfig& config,
                            const PhiTrajectory* phi_in) {
    inst.validate();
    if (g_samples.size() != inst.grid.size())
        throw UsageError("g samples must match the instance grid");

    Certificate cert;
    const ConditionReport cond = check_conditions(inst, config);
    cert.condition9_margin = cond.condition9_margin;
    cert.condition10_ok = cond.condition10_ok;

    PhiTrajectory local;
    const PhiTrajectory* phi = phi_in;
    if (!phi) {
        local = integrate_phi(inst, config);
        phi = &local;
    }
    cert.phi_blew_up = phi->blew_up;
    if (phi->blew_up || phi->phi.size() != inst.grid.size()) {
        cert.sandwich_ok = false;
        cert.max_violation = std::numeric_limits<double>::infinity();
        cert.worst_t = phi->blew_up ? phi->blowup_time : inst.grid.back();
        return cert;
    }

    cert.sandwich_ok = true;
    for (std::size_t i = 0; i < inst.grid.size(); ++i) {
        const double t = inst.grid[i];
        const double inv = 1.0 / inst.mu(t);
        const double tol = config.tol_cert * (1.0 + inv);
        const double v1 = g_samples[i] - phi->phi[i]; // g <= phi
        const double v2 = phi->phi[i] - inv;          // phi <= mu^{-1}
        if (v1 > tol || v2 > tol) cert.sandwich_ok = false;
        // The reported violation measures how far outside the certified
        // bound mu^{-1} the data got.
        const double v = std::max(g_samples[i] - inv, v2);
        if (v > cert.max_violation) {
            cert.max_violation = v;
            cert.worst_t = t;
        }
    }
    if (cert.max_violation < 0.0) cert.max_violation = 0.0;
    return cert;
}

} // namespace dsm
