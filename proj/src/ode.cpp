#include "ode.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace dsm {

namespace {

// Dormand-Prince coefficients.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
// Difference between the 5th and embedded 4th order weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

double error_norm(const Vector& err, const Vector& y0, const Vector& y1, const OdeOptions& opt) {
    double acc = 0.0;
    for (int i = 0; i < err.size(); ++i) {
        const double scale =
            opt.abs_tol + opt.rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        const double q = err[i] / scale;
        acc += q * q;
    }
    return std::sqrt(acc / static_cast<double>(err.size()));
}

} // namespace

OdeResult integrate_ode(const OdeRhs& rhs, double t0, Vector y0, double t_end,
                        const OdeOptions& opt, std::span<const double> forced_times,
                        const OdeObserver& observer) {
    OdeResult out;
    double t = t0;
    Vector y = std::move(y0);
    const int n = static_cast<int>(y.size());
    std::size_t next_forced = 0;
    while (next_forced < forced_times.size() && forced_times[next_forced] <= t0) ++next_forced;

    auto eval = [&](double tt, const Vector& yy) {
        ++out.rhs_evals;
        return rhs(tt, yy);
    };

    Vector k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
    bool have_k1 = false;

    double h = std::min(opt.initial_step, t_end - t0);
    if (h <= 0.0) {
        out.t_end = t;
        out.y_end = y;
        return out;
    }

    try {
        if (observer) {
            OdeStep s{t, &y, 0.0, false};
            if (!observer(s)) {
                out.status = OdeStatus::ObserverStop;
                out.t_end = t;
                out.y_end = y;
                return out;
            }
        }
        k1 = eval(t, y);
        have_k1 = true;

        while (t < t_end) {
            if (out.steps + out.rejected >= opt.max_steps) {
                out.status = OdeStatus::MaxSteps;
                out.message = "step budget exhausted";
                break;
            }
            bool forced_hit = false;
            double h_try = std::min(h, t_end - t);
            if (next_forced < forced_times.size()) {
                const double gap = forced_times[next_forced] - t;
                if (h_try >= gap * (1.0 - 1e-14)) {
                    h_try = gap;
                    forced_hit = true;
                }
            }
            if (t + h_try == t) {
                out.status = OdeStatus::StepUnderflow;
                out.message = "step size vanished against t";
                break;
            }

            if (!have_k1) {
                k1 = eval(t, y);
                have_k1 = true;
            }
            k2 = eval(t + c2 * h_try, y + h_try * (a21 * k1));
            k3 = eval(t + c3 * h_try, y + h_try * (a31 * k1 + a32 * k2));
            k4 = eval(t + c4 * h_try, y + h_try * (a41 * k1 + a42 * k2 + a43 * k3));
            k5 = eval(t + c5 * h_try, y + h_try * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
            k6 = eval(t + h_try, y + h_try * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            Vector y_new = y + h_try * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            k7 = eval(t + h_try, y_new);
            Vector err =
                h_try * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

            const double en = error_norm(err, y, y_new, opt);
            if (en <= 1.0) {
                t = forced_hit ? forced_times[next_forced] : t + h_try;
                if (forced_hit) ++next_forced;
                out.error_estimate +=
                    en * (opt.abs_tol + opt.rel_tol * y_new.cwiseAbs().maxCoeff());
                y.swap(y_new);
                k1.swap(k7); // FSAL
                ++out.steps;
                if (!y.allFinite()) {
                    out.status = OdeStatus::RhsFailure;
                    out.message = "state became non-finite";
                    break;
                }
                if (y.norm() > opt.blowup_norm) {
                    out.status = OdeStatus::BlowUp;
                    out.message = "solution norm exceeded the blow-up sentinel";
                    break;
                }
                if (observer) {
                    OdeStep s{t, &y, h_try, forced_hit};
                    if (!observer(s)) {
                        out.status = OdeStatus::ObserverStop;
                        break;
                    }
                }
            } else {
                ++out.rejected;
                have_k1 = true; // k1 still valid at (t, y)
            }

            const double factor =
                std::clamp(0.9 * std::pow(std::max(en, 1e-10), -0.2), 0.2, opt.max_growth);
            // Grow from the controller's step, not from a clipped one.
            h = (forced_hit && en <= 1.0) ? h * factor : h_try * factor;
            const double floor = opt.min_step * std::max(1.0, std::abs(t));
            if (h < floor && t < t_end) {
                if (en <= 1.0 && t >= t_end * (1.0 - 1e-15)) break;
                out.status = OdeStatus::StepUnderflow;
                out.message = "step size underflow";
                break;
            }
        }
    } catch (const Error& e) {
        out.status = OdeStatus::RhsFailure;
        out.message = e.what();
    }

    out.t_end = t;
    out.y_end = std::move(y);
    return out;
}

} // namespace dsm
