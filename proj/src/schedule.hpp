#pragma once

#include <array>
#include <complex>
#include <string>

namespace dsm {

struct ScheduleInputs {
    double b = 1.0;     // resolvent growth exponent
    double kappa = 1.0; // Holder exponent of the derivative
    double c0 = 0.0;    // Holder constant
    double c1 = 1.0;    // resolvent constant
    double c2 = 1.0;    // bound on c1 ||w_a||
    double g0 = 0.0;    // initial distance ||u0 - w_{a(0)}||
    double r0 = 1.0;    // initial radius |a(0)|
    double theta = 0.0; // ray angle
    double eps0 = 1.0;  // path radius bound
    void validate() const;
};

// The derived decay law and its companion constants. With p = 1 + kappa:
//   k = (b+1)/(p-1),            lambda = r0^k / (2 g0),
//   c3 = c0 c1,  c4 = c2 lambda, c5 = r0^{2-kp},  c6 = (kp-2)/(4 c4),
//   r(t) = (c5 + c6 t)^{-1/(kp-2)}.
// r solves c4 |rdot| / r^{kp-1} = 1/4 exactly, and the error envelope is
// mu^{-1}(t) = r^k(t)/lambda.
class Schedule {
public:
    // The constant the decay law balances |rdot| against; fixed by the
    // derivation and surfaced read-only in run manifests.
    static constexpr double decay_balance = 0.25;

    double p() const noexcept { return p_; }
    double k() const noexcept { return k_; }
    double lambda() const noexcept { return lambda_; }
    double c2() const noexcept { return c2_; }
    double c3() const noexcept { return c3_; }
    double c4() const noexcept { return c4_; }
    double c5() const noexcept { return c5_; }
    double c6() const noexcept { return c6_; }
    double b() const noexcept { return b_; }
    double kappa() const noexcept { return kappa_; }
    double g0() const noexcept { return g0_; }
    double r0() const noexcept { return r0_; }
    double theta() const noexcept { return theta_; }
    double eps0() const noexcept { return eps0_; }
    double kp_minus_2() const noexcept { return kp_minus_2_; }

    double r(double t) const;
    double rdot(double t) const; // strictly negative
    std::complex<double> a(double t) const { return ray_ * r(t); }
    double mu(double t) const;        // lambda r^{-k}(t)
    double envelope(double t) const;  // mu^{-1}(t) = r^k(t)/lambda
    // Inverse of the decay law: the t with r(t) = r_target.
    double time_for_radius(double r_target) const;

private:
    friend Schedule derive_schedule(const ScheduleInputs&);
    double p_ = 2, k_ = 2, lambda_ = 1, c2_ = 1, c3_ = 0, c4_ = 1, c5_ = 1, c6_ = 1;
    double b_ = 1, kappa_ = 1, g0_ = 0, r0_ = 1, theta_ = 0, eps0_ = 1;
    double kp_minus_2_ = 2;
    std::complex<double> ray_ = 1.0;
};

// k = (b+1)/kappa. Requires b > 0 and kappa in (0, 1].
double derive_exponent(double b, double kappa);

// lambda = r0^k / (2 g0); makes mu(0) g(0) = 1/2. Requires g0 > 0 (callers
// substitute the documented floor for a measured zero).
double derive_lambda(double r0, double k, double g0);

Schedule derive_schedule(const ScheduleInputs& inputs);

struct GateCheck {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0; // >= 0 means the gate holds
    bool pass = false;
    std::string remediation; // which of r0/g0 to move, and to where
};

struct GateReport {
    std::array<GateCheck, 3> gates;
    bool all_pass = false;
    const GateCheck& decay_rate() const { return gates[0]; }
    const GateCheck& initial_distance() const { return gates[1]; }
    const GateCheck& initial_radius() const { return gates[2]; }
};

// The three sufficient conditions the derivation demands of (r0, g0):
//   decay-rate:        k r0^{kp-2} / (4 c4) <= 1/2
//   initial-distance:  g0 <= (c2/k) r0^{b-1}
//   initial-radius:    r0 >= [4 c3 (2 c2/k)^{p-1}]^{1/(kappa + (1-kappa) b)}
GateReport validate_initial_conditions(const Schedule& schedule, const ScheduleInputs& inputs);

} // namespace dsm
