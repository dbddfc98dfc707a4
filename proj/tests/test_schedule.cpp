#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "errors.hpp"
#include "rng.hpp"
#include "schedule.hpp"

using namespace dsm;

namespace {

ScheduleInputs worked_example() {
    ScheduleInputs in;
    in.b = 1.0;
    in.kappa = 1.0;
    in.c0 = 0.0;
    in.c1 = 1.0;
    in.c2 = 1.0;
    in.g0 = 0.25;
    in.r0 = 1.0;
    in.theta = 0.0;
    in.eps0 = 10.0;
    return in;
}

} // namespace

TEST_CASE("exponent derivation") {
    CHECK(derive_exponent(1.0, 1.0) == doctest::Approx(2.0));
    CHECK(derive_exponent(1.0, 0.5) == doctest::Approx(4.0));
    CHECK(derive_exponent(0.5, 1.0) == doctest::Approx(1.5));
    CHECK_THROWS_AS(derive_exponent(1.0, 0.0), UsageError);
    CHECK_THROWS_AS(derive_exponent(1.0, 1.5), UsageError);
    CHECK_THROWS_AS(derive_exponent(0.0, 1.0), UsageError);
}

TEST_CASE("lambda derivation") {
    CHECK(derive_lambda(1.0, 2.0, 0.25) == doctest::Approx(2.0));
    CHECK(derive_lambda(2.0, 2.0, 1.0) == doctest::Approx(2.0));
    CHECK_THROWS_AS(derive_lambda(1.0, 2.0, 0.0), UsageError);
    // mu(0) g0 = 1/2 by construction.
    CounterRng rng(1, 1);
    for (int i = 0; i < 50; ++i) {
        const double r0 = rng.uniform(0.1, 5.0);
        const double k = rng.uniform(0.5, 6.0);
        const double g0 = rng.uniform(1e-4, 2.0);
        const double lambda = derive_lambda(r0, k, g0);
        CHECK(lambda * std::pow(r0, -k) * g0 == doctest::Approx(0.5).epsilon(1e-12));
    }
}

TEST_CASE("worked example constants") {
    Schedule s = derive_schedule(worked_example());
    CHECK(s.k() == doctest::Approx(2.0));
    CHECK(s.p() == doctest::Approx(2.0));
    CHECK(s.lambda() == doctest::Approx(2.0));
    CHECK(s.c4() == doctest::Approx(2.0));
    CHECK(s.c5() == doctest::Approx(1.0));
    CHECK(s.c6() == doctest::Approx(0.25));
    CHECK(s.c3() == 0.0);
    CHECK(s.r(0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(s.r(12.0) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("worked example evaluation at t = 0") {
    Schedule s = derive_schedule(worked_example());
    CHECK(s.r(0.0) == doctest::Approx(1.0));
    CHECK(s.rdot(0.0) == doctest::Approx(-0.125));
    CHECK(s.a(0.0).real() == doctest::Approx(1.0));
    CHECK(s.a(0.0).imag() == doctest::Approx(0.0));
    CHECK(s.envelope(0.0) == doctest::Approx(0.5));
}

TEST_CASE("time-radius inversion") {
    Schedule s = derive_schedule(worked_example());
    for (double r : {0.9, 0.5, 0.1, 1e-3}) {
        CHECK(s.r(s.time_for_radius(r)) == doctest::Approx(r).epsilon(1e-12));
    }
    CHECK(s.time_for_radius(0.5) == doctest::Approx(12.0));
}

TEST_CASE("exponent identities on 1000 random inputs") {
    CounterRng rng(2024, 7);
    for (int i = 0; i < 1000; ++i) {
        const double b = rng.uniform(1e-6, 3.0);
        const double kappa = rng.uniform(1e-6, 1.0);
        const double p = 1.0 + kappa;
        const double k = derive_exponent(b, kappa);
        CHECK(std::abs((k + b) - (k * p - 1.0)) <= 1e-12 * std::max(1.0, std::abs(k + b)));
        CHECK(std::abs((k * (p - 1.0) - 2.0) - (b - 1.0)) <=
              1e-12 * std::max(1.0, std::abs(b - 1.0)));
        CHECK(k * p > 2.0);
        CHECK(kappa + (1.0 - kappa) * b > 0.0);
        // kp - 2 = (b + 1 + kappa (b - 1)) / kappa, positive by construction.
        CHECK(k * p - 2.0 ==
              doctest::Approx((b + 1.0 + kappa * (b - 1.0)) / kappa).epsilon(1e-12));
    }
}

TEST_CASE("decay balance holds exactly along the law") {
    CounterRng rng(5, 3);
    for (int inst = 0; inst < 20; ++inst) {
        ScheduleInputs in = worked_example();
        in.b = rng.uniform(0.2, 2.5);
        in.kappa = rng.uniform(0.1, 1.0);
        in.c2 = rng.uniform(0.5, 3.0);
        in.g0 = rng.uniform(0.05, 1.0);
        in.r0 = rng.uniform(0.5, 5.0);
        Schedule s = derive_schedule(in);
        for (int j = 0; j < 100; ++j) {
            const double t = std::pow(10.0, rng.uniform(-2.0, 6.0));
            const double lhs =
                s.c4() * std::abs(s.rdot(t)) / std::pow(s.r(t), s.k() * s.p() - 1.0);
            CHECK(lhs == doctest::Approx(0.25).epsilon(1e-10));
        }
        // k |rdot| / r equals k r^{kp-2} / (4 c4) for all t.
        for (double t : {0.0, 1.0, 30.0, 500.0}) {
            const double lhs = s.k() * std::abs(s.rdot(t)) / s.r(t);
            const double rhs = s.k() * std::pow(s.r(t), s.kp_minus_2()) / (4.0 * s.c4());
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        }
    }
}

TEST_CASE("decay law is monotone with decaying rate") {
    Schedule s = derive_schedule(worked_example());
    double prev_r = std::numeric_limits<double>::infinity();
    double prev_rate = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 3000; ++i) {
        const double t = 0.1 * i;
        CHECK(s.r(t) > 0.0);
        CHECK(s.r(t) < prev_r);
        CHECK(s.rdot(t) < 0.0);
        CHECK(std::abs(s.rdot(t)) < prev_rate);
        prev_r = s.r(t);
        prev_rate = std::abs(s.rdot(t));
    }
    // envelope decreases to zero
    CHECK(s.envelope(1e12) < 1e-5);
}

TEST_CASE("gates pass on the worked example") {
    ScheduleInputs in = worked_example();
    Schedule s = derive_schedule(in);
    GateReport rep = validate_initial_conditions(s, in);
    CHECK(rep.all_pass);
    CHECK(rep.decay_rate().lhs == doctest::Approx(0.25));
    CHECK(rep.decay_rate().slack == doctest::Approx(0.25));
    CHECK(rep.initial_distance().rhs == doctest::Approx(0.5));
    CHECK(rep.initial_radius().lhs == 0.0);
}

TEST_CASE("initial-distance gate with b = 1 is independent of r0") {
    ScheduleInputs in = worked_example();
    in.c0 = 0.5;
    for (double r0 : {0.5, 1.0, 4.0}) {
        in.r0 = r0;
        Schedule s = derive_schedule(in);
        GateReport rep = validate_initial_conditions(s, in);
        CHECK(rep.initial_distance().rhs == doctest::Approx(in.c2 / s.k()));
    }
}

TEST_CASE("oversized g0 fails the initial-distance gate with remediation") {
    ScheduleInputs in = worked_example();
    in.g0 = 1e6;
    Schedule s = derive_schedule(in);
    GateReport rep = validate_initial_conditions(s, in);
    CHECK_FALSE(rep.all_pass);
    CHECK_FALSE(rep.initial_distance().pass);
    CHECK(rep.initial_distance().remediation.find("shrink g0") != std::string::npos);
}

TEST_CASE("small r0 fails the initial-radius gate when c3 > 0") {
    ScheduleInputs in = worked_example();
    in.c0 = 2.0; // c3 = 2, threshold = 4 c3 (2 c2 / k)^{p-1} = 8
    in.r0 = 1.0;
    in.g0 = 0.1;
    Schedule s = derive_schedule(in);
    GateReport rep = validate_initial_conditions(s, in);
    CHECK_FALSE(rep.initial_radius().pass);
    CHECK(rep.initial_radius().lhs == doctest::Approx(8.0));
    CHECK(rep.initial_radius().remediation.find("raise r0") != std::string::npos);
}

TEST_CASE("input validation") {
    ScheduleInputs in = worked_example();
    in.r0 = 20.0; // >= eps0
    CHECK_THROWS_AS(derive_schedule(in), UsageError);
    in = worked_example();
    in.g0 = -1.0;
    CHECK_THROWS_AS(derive_schedule(in), UsageError);
    in = worked_example();
    in.kappa = 0.0;
    CHECK_THROWS_AS(derive_schedule(in), UsageError);
}
