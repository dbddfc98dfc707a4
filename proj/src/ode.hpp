#pragma once

#include <functional>
#include <limits>
#include <span>
#include <string>

#include "linalg.hpp"

namespace dsm {

struct OdeOptions {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    double initial_step = 0.01;
    double min_step = 1e-12; // absolute floor; scaled by max(1, |t|) internally
    double max_growth = 10.0;
    long max_steps = 10'000'000;
    double blowup_norm = std::numeric_limits<double>::infinity();
};

enum class OdeStatus { Done, StepUnderflow, MaxSteps, ObserverStop, RhsFailure, BlowUp };

struct OdeStep {
    double t = 0.0;
    const Vector* y = nullptr;
    double h_used = 0.0;
    bool forced_point = false; // step landed exactly on a requested time
};

struct OdeResult {
    OdeStatus status = OdeStatus::Done;
    double t_end = 0.0;
    Vector y_end;
    long steps = 0;
    long rejected = 0;
    long rhs_evals = 0;
    // Sum of accepted local error estimates (scaled back to solution units);
    // a pessimistic bound on the accumulated integration error.
    double error_estimate = 0.0;
    std::string message;
};

using OdeRhs = std::function<Vector(double, const Vector&)>;
// Return false to stop integration (status ObserverStop).
using OdeObserver = std::function<bool(const OdeStep&)>;

// Embedded Dormand-Prince 5(4) pair with FSAL and standard step control.
// forced_times (strictly increasing, within (t0, t_end]) are hit exactly;
// the observer fires at every accepted step. Exceptions of type dsm::Error
// thrown by the rhs are converted into RhsFailure.
OdeResult integrate_ode(const OdeRhs& rhs, double t0, Vector y0, double t_end,
                        const OdeOptions& options, std::span<const double> forced_times = {},
                        const OdeObserver& observer = nullptr);

} // namespace dsm
