#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "errors.hpp"
#include "rng.hpp"
#include "vector_space.hpp"

using namespace dsm;

TEST_CASE("norm axioms hold on random triples") {
    const double eps = std::numeric_limits<double>::epsilon();
    for (double p : {2.0, 1.5, 3.0}) {
        VectorSpace space(5, p == 2.0 ? NormKind::L2 : NormKind::Lp, p);
        CounterRng rng(7, 11);
        for (int i = 0; i < 500; ++i) {
            Vector u = rng.normal_vector(5);
            Vector v = rng.normal_vector(5);
            double s = rng.uniform(-4.0, 4.0);
            CHECK(space.norm(u) >= 0.0);
            CHECK(space.norm(Vector(Vector::Zero(5))) == 0.0);
            const double scale = std::max(1.0, space.norm(u));
            CHECK(std::abs(space.norm(Vector(s * u)) - std::abs(s) * space.norm(u)) <=
                  8 * eps * std::abs(s) * scale);
            CHECK(space.norm(Vector(u + v)) <=
                  space.norm(u) + space.norm(v) + 8 * eps * (space.norm(u) + space.norm(v)));
        }
    }
}

TEST_CASE("norm is positive definite") {
    VectorSpace space(3, NormKind::Lp, 1.5);
    Vector v = Vector::Zero(3);
    CHECK(space.norm(v) == 0.0);
    v[1] = 1e-8;
    CHECK(space.norm(v) > 0.0);
}

TEST_CASE("l2 norm rate matches the inner-product formula") {
    VectorSpace space(2);
    Vector w(2), wdot(2);
    w << 3, 4;
    wdot << 1, 0;
    CHECK(space.norm(w) == doctest::Approx(5.0));
    CHECK(space.norm_rate(w, wdot) == doctest::Approx(3.0 / 5.0));
}

TEST_CASE("stationary and orthogonal directions") {
    VectorSpace l2(2);
    VectorSpace lp(2, NormKind::Lp, 3.0);
    Vector w(2), zero(2), e2(2);
    w << 1, 0;
    zero << 0, 0;
    e2 << 0, 1;
    CHECK(l2.norm_rate(w, zero) == 0.0);
    CHECK(lp.norm_rate(w, zero) == 0.0);
    CHECK(l2.norm_rate(w, e2) == doctest::Approx(0.0));
    CHECK(std::abs(l2.norm_rate(w, e2)) <= l2.norm(e2));
}

TEST_CASE("norm rate is bounded by the direction norm") {
    for (double p : {2.0, 1.5, 3.0}) {
        VectorSpace space(6, p == 2.0 ? NormKind::L2 : NormKind::Lp, p);
        CounterRng rng(13, 5);
        for (int i = 0; i < 300; ++i) {
            Vector w = rng.normal_vector(6);
            Vector wdot = rng.normal_vector(6);
            if (space.norm(w) < 1e-8) continue;
            const double rate = space.norm_rate(w, wdot);
            CHECK(std::abs(rate) <= space.norm(wdot) * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("norm rate at zero is an error") {
    VectorSpace space(2, NormKind::Lp, 1.5);
    Vector zero = Vector::Zero(2);
    Vector d(2);
    d << 1, 1;
    CHECK_THROWS_AS(space.norm_rate(zero, d), NondifferentiablePointError);
}

TEST_CASE("dimension mismatches are usage errors") {
    VectorSpace space(3);
    Vector bad(2);
    bad << 1, 2;
    CHECK_THROWS_AS(space.norm(bad), UsageError);
}

TEST_CASE("invalid lp exponent rejected") {
    CHECK_THROWS_AS(VectorSpace(2, NormKind::Lp, 1.0), UsageError);
    CHECK_THROWS_AS(VectorSpace(2, NormKind::Lp, 0.5), UsageError);
}

// Centered finite differences of t -> ||w(t)|| never exceed ||wdot|| by more
// than the curvature allowance.
TEST_CASE("norm rate along curves obeys the derivative bound") {
    for (double p : {2.0, 1.5, 3.0}) {
        VectorSpace space(4, p == 2.0 ? NormKind::L2 : NormKind::Lp, p);
        CounterRng rng(101, static_cast<std::uint64_t>(p * 100));
        for (int trial = 0; trial < 50; ++trial) {
            Vector base = rng.normal_vector(4) * 2.0;
            Vector a1 = rng.normal_vector(4);
            Vector a2 = rng.normal_vector(4);
            const double w1 = rng.uniform(0.3, 2.0);
            const double w2 = rng.uniform(0.3, 2.0);
            auto curve = [&](double t) {
                return Vector(base + a1 * std::sin(w1 * t) + a2 * std::cos(w2 * t));
            };
            auto dcurve = [&](double t) {
                return Vector(a1 * w1 * std::cos(w1 * t) - a2 * w2 * std::sin(w2 * t));
            };
            const double m_bound = a1.norm() * w1 * w1 + a2.norm() * w2 * w2;
            const double t = rng.uniform(0.0, 6.0);
            if (space.norm(curve(t)) < 1e-6) continue;
            for (double s : {1e-3, 1e-4}) {
                const double fd =
                    (space.norm(curve(t + s)) - space.norm(curve(t - s))) / (2.0 * s);
                CHECK(std::abs(fd) <= space.norm(dcurve(t)) + 10.0 * s * m_bound);
            }
        }
    }
}
