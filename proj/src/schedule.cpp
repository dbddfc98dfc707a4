#include "schedule.hpp"

#include <cmath>
#include <sstream>

#include "errors.hpp"

namespace dsm {

void ScheduleInputs::validate() const {
    if (!(b > 0.0)) throw UsageError("b must be positive");
    if (!(kappa > 0.0 && kappa <= 1.0)) throw UsageError("kappa must lie in (0, 1]");
    if (!(c0 >= 0.0)) throw UsageError("c0 must be nonnegative");
    if (!(c1 > 0.0)) throw UsageError("c1 must be positive");
    if (!(c2 > 0.0)) throw UsageError("c2 must be positive");
    if (!(g0 >= 0.0)) throw UsageError("g0 must be nonnegative");
    if (!(r0 > 0.0)) throw UsageError("r0 must be positive");
    if (!(eps0 > 0.0)) throw UsageError("eps0 must be positive");
    if (!(r0 < eps0)) throw UsageError("r0 must be smaller than eps0");
}

double derive_exponent(double b, double kappa) {
    if (!(b > 0.0)) throw UsageError("b must be positive");
    if (!(kappa > 0.0 && kappa <= 1.0)) throw UsageError("kappa must lie in (0, 1]");
    return (b + 1.0) / kappa; // p - 1 = kappa
}

double derive_lambda(double r0, double k, double g0) {
    if (!(g0 > 0.0)) throw UsageError("lambda derivation needs g0 > 0");
    if (!(r0 > 0.0) || !(k > 0.0)) throw UsageError("lambda derivation needs r0 > 0 and k > 0");
    return std::pow(r0, k) / (2.0 * g0);
}

Schedule derive_schedule(const ScheduleInputs& in) {
    in.validate();
    Schedule s;
    s.b_ = in.b;
    s.kappa_ = in.kappa;
    s.g0_ = in.g0;
    s.r0_ = in.r0;
    s.theta_ = in.theta;
    s.eps0_ = in.eps0;
    s.ray_ = std::polar(1.0, in.theta);
    s.p_ = 1.0 + in.kappa;
    s.k_ = derive_exponent(in.b, in.kappa);
    s.lambda_ = derive_lambda(in.r0, s.k_, in.g0);
    s.c2_ = in.c2;
    s.c3_ = in.c0 * in.c1;
    s.c4_ = in.c2 * s.lambda_;
    s.kp_minus_2_ = s.k_ * s.p_ - 2.0; // = (b + 1 + kappa (b-1)) / kappa > 0
    s.c5_ = std::pow(in.r0, -s.kp_minus_2_);
    s.c6_ = s.kp_minus_2_ / (4.0 * s.c4_);
    return s;
}

double Schedule::r(double t) const { return std::pow(c5_ + c6_ * t, -1.0 / kp_minus_2_); }

double Schedule::rdot(double t) const {
    return -(c6_ / kp_minus_2_) * std::pow(c5_ + c6_ * t, -1.0 / kp_minus_2_ - 1.0);
}

double Schedule::mu(double t) const { return lambda_ * std::pow(r(t), -k_); }

double Schedule::envelope(double t) const { return std::pow(r(t), k_) / lambda_; }

double Schedule::time_for_radius(double r_target) const {
    if (!(r_target > 0.0)) throw UsageError("target radius must be positive");
    if (r_target >= r0_) return 0.0;
    return (std::pow(r_target, -kp_minus_2_) - c5_) / c6_;
}

GateReport validate_initial_conditions(const Schedule& s, const ScheduleInputs& in) {
    GateReport report;
    const double k = s.k();
    const double p = s.p();

    // Decay-rate gate: k |rdot(t)|/r(t) peaks at t = 0, where it equals
    // k r0^{kp-2} / (4 c4); demand it stay below 1/2.
    {
        GateCheck& g = report.gates[0];
        g.name = "decay-rate";
        g.lhs = k * std::pow(in.r0, s.kp_minus_2()) / (4.0 * s.c4());
        g.rhs = 0.5;
        g.slack = g.rhs - g.lhs;
        g.pass = g.lhs <= g.rhs;
        if (!g.pass) {
            std::ostringstream rem;
            const double g0_max = (in.c2 / k) * std::pow(in.r0, 1.0 - in.b);
            rem << "shrink g0 to at most " << g0_max;
            if (in.b > 1.0)
                rem << ", or shrink r0 to at most "
                    << std::pow(in.c2 / (k * in.g0), 1.0 / (in.b - 1.0));
            else if (in.b < 1.0)
                rem << ", or raise r0 to at least "
                    << std::pow(k * in.g0 / in.c2, 1.0 / (1.0 - in.b));
            g.remediation = rem.str();
        }
    }

    // Initial-distance gate: g0 <= (c2/k) r0^{b-1}. For b = 1 this is
    // g0 <= c2/k, independent of r0.
    {
        GateCheck& g = report.gates[1];
        g.name = "initial-distance";
        g.lhs = in.g0;
        g.rhs = (in.c2 / k) * std::pow(in.r0, in.b - 1.0);
        g.slack = g.rhs - g.lhs;
        g.pass = g.lhs <= g.rhs;
        if (!g.pass) {
            std::ostringstream rem;
            rem << "shrink g0 to at most " << g.rhs;
            if (in.b > 1.0)
                rem << ", or raise r0 to at least "
                    << std::pow(k * in.g0 / in.c2, 1.0 / (in.b - 1.0));
            else if (in.b < 1.0)
                rem << ", or shrink r0 to at most "
                    << std::pow(in.c2 / (k * in.g0), 1.0 / (1.0 - in.b));
            g.remediation = rem.str();
        }
    }

    // Initial-radius gate: r0 must dominate the nonlinearity constant. The
    // exponent kappa + (1-kappa) b is positive for every b > 0, kappa in
    // (0,1], so a large enough r0 always exists.
    {
        GateCheck& g = report.gates[2];
        g.name = "initial-radius";
        const double expo = in.kappa + (1.0 - in.kappa) * in.b;
        const double c3 = in.c0 * in.c1;
        const double base = 4.0 * c3 * std::pow(2.0 * in.c2 / k, p - 1.0);
        // lhs <= rhs means pass, as for the other gates: threshold vs r0.
        g.lhs = c3 == 0.0 ? 0.0 : std::pow(base, 1.0 / expo);
        g.rhs = in.r0;
        g.slack = g.rhs - g.lhs;
        g.pass = g.lhs <= g.rhs;
        if (!g.pass) {
            std::ostringstream rem;
            rem << "raise r0 to at least " << g.lhs;
            if (g.lhs >= in.eps0) rem << " (note: this exceeds eps0 = " << in.eps0 << ")";
            g.remediation = rem.str();
        }
    }

    report.all_pass = report.gates[0].pass && report.gates[1].pass && report.gates[2].pass;
    return report;
}

} // namespace dsm
