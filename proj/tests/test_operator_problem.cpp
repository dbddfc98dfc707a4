#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "errors.hpp"
#include "gallery.hpp"
#include "operator_problem.hpp"
#include "rng.hpp"

using namespace dsm;

namespace {

OperatorProblem identity_problem(int n) {
    OperatorProblemConfig cfg{VectorSpace(n)};
    cfg.name = "identity";
    cfg.linear_matrix = Matrix::Identity(n, n);
    cfg.rhs = Vector::Zero(n);
    cfg.resolvent.eps0 = 1e3;
    return OperatorProblem(std::move(cfg));
}

OperatorProblem diag_problem(const Vector& d) {
    OperatorProblemConfig cfg{VectorSpace(static_cast<int>(d.size()))};
    cfg.name = "diag";
    cfg.linear_matrix = Matrix(d.asDiagonal());
    cfg.rhs = Vector::Zero(d.size());
    cfg.resolvent.eps0 = 1e3;
    return OperatorProblem(std::move(cfg));
}

OperatorProblem monotone_holder(int n, double kappa) {
    GalleryParams p;
    p.n = n;
    p.kappa = kappa;
    return make_gallery("monotone-holder", p);
}

} // namespace

TEST_CASE("identity evaluation") {
    OperatorProblem prob = identity_problem(2);
    Vector u(2);
    u << 1, 2;
    Vector out = prob.eval_apply(u);
    CHECK(out[0] == 1.0);
    CHECK(out[1] == 2.0);
}

TEST_CASE("componentwise monotone map with kappa = 1") {
    OperatorProblem prob = monotone_holder(2, 1.0);
    Vector u(2);
    u << 2, -1;
    Vector out = prob.eval_apply(u);
    CHECK(out[0] == doctest::Approx(6.0));
    CHECK(out[1] == doctest::Approx(-2.0));
}

TEST_CASE("kernel gallery column equals independently assembled quadrature") {
    GalleryParams p;
    p.n = 4;
    OperatorProblem prob = make_gallery("illposed-kernel", p);
    Vector e1 = Vector::Zero(4);
    e1[0] = 1.0;
    Vector col = prob.eval_apply(e1);
    // Oracle: assemble the midpoint-rule matrix directly.
    const double h = 0.25;
    for (int i = 0; i < 4; ++i) {
        const double s = (i + 0.5) * h;
        const double t = 0.5 * h;
        CHECK(col[i] == doctest::Approx(h * h * std::exp(-(s - t) * (s - t))).epsilon(1e-14));
    }
}

TEST_CASE("derivative of a linear map is the map") {
    CounterRng rng(3, 1);
    Matrix m = rng.normal_matrix(4, 4);
    OperatorProblemConfig cfg{VectorSpace(4)};
    cfg.name = "linear";
    cfg.linear_matrix = m;
    cfg.rhs = Vector::Zero(4);
    cfg.resolvent.eps0 = 1e3;
    OperatorProblem prob(std::move(cfg));
    for (int i = 0; i < 10; ++i) {
        Vector u = rng.normal_vector(4);
        Vector h = rng.normal_vector(4);
        CHECK((prob.apply_derivative(u, h) - m * h).norm() <= 1e-14 * h.norm());
    }
}

TEST_CASE("derivative of the monotone map, worked values") {
    OperatorProblem prob = monotone_holder(2, 1.0);
    Vector u(2), h(2);
    u << 2, -1;
    h << 1, 1;
    Vector out = prob.apply_derivative(u, h);
    CHECK(out[0] == doctest::Approx(5.0));
    CHECK(out[1] == doctest::Approx(3.0));
}

TEST_CASE("derivative at zero direction is zero") {
    OperatorProblem prob = monotone_holder(3, 0.5);
    Vector u(3);
    u << 0.3, -0.2, 1.1;
    CHECK(prob.apply_derivative(u, Vector(Vector::Zero(3))).norm() == 0.0);
}

TEST_CASE("derivative action is linear") {
    OperatorProblem prob = monotone_holder(5, 0.7);
    CounterRng rng(17, 2);
    for (int i = 0; i < 100; ++i) {
        Vector u = rng.normal_vector(5);
        Vector h1 = rng.normal_vector(5);
        Vector h2 = rng.normal_vector(5);
        const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2);
        Vector lhs = prob.apply_derivative(u, Vector(a * h1 + b * h2));
        Vector rhs = a * prob.apply_derivative(u, h1) + b * prob.apply_derivative(u, h2);
        CHECK((lhs - rhs).norm() <= 1e-10 * (h1.norm() + h2.norm()));
    }
}

TEST_CASE("forward differences agree with the derivative at rate kappa") {
    for (double kappa : {1.0, 0.5}) {
        OperatorProblem prob = monotone_holder(4, kappa);
        CounterRng rng(23, 3);
        for (int i = 0; i < 30; ++i) {
            Vector u = rng.normal_vector(4);
            Vector h = rng.normal_vector(4);
            Vector ah = prob.apply_derivative(u, h);
            for (double s : {1e-4, 1e-5, 1e-6}) {
                Vector fd = (prob.eval_apply(Vector(u + s * h)) - prob.eval_apply(u)) / s;
                const double tol_fd = 4.0 * std::pow(s * h.norm(), kappa) * h.norm() + 1e-9;
                CHECK((fd - ah).norm() <= tol_fd * (1.0 + ah.norm()));
            }
        }
    }
}

TEST_CASE("gallery solutions satisfy F(y) = f") {
    for (const std::string& name : gallery_names()) {
        GalleryParams p;
        p.n = 6;
        OperatorProblem prob = make_gallery(name, p);
        REQUIRE(prob.known_solution().has_value());
        const Vector& y = *prob.known_solution();
        const double err = prob.norm(Vector(prob.eval_apply(y) - prob.rhs()));
        CHECK(err <= 1e-10 * (1.0 + prob.norm(prob.rhs())));
    }
}

TEST_CASE("resolvent of the zero operator is a^{-1}") {
    OperatorProblemConfig cfg{VectorSpace(1)};
    cfg.name = "zero";
    cfg.linear_matrix = Matrix::Zero(1, 1);
    cfg.rhs = Vector::Zero(1);
    cfg.resolvent.eps0 = 1e3;
    OperatorProblem prob(std::move(cfg));
    Vector v(1);
    v << 1;
    Vector h = prob.apply_resolvent(Vector(Vector::Zero(1)), 0.5, v);
    CHECK(h[0] == doctest::Approx(2.0));
}

TEST_CASE("diagonal resolvent solves") {
    Vector d(2);
    d << 0, 1;
    OperatorProblem prob = diag_problem(d);
    Vector u = Vector::Zero(2);
    SUBCASE("real shift") {
        Vector v(2);
        v << 1, 1;
        Vector h = prob.apply_resolvent(u, 0.1, v);
        CHECK(h[0] == doctest::Approx(10.0));
        CHECK(h[1] == doctest::Approx(1.0 / 1.1));
    }
    SUBCASE("imaginary shift") {
        ComplexVector v(2);
        v << Complex(1, 0), Complex(0, 0);
        ComplexVector h = prob.apply_resolvent(u, Complex(0, 0.1), v);
        CHECK(h[0].real() == doctest::Approx(0.0));
        CHECK(h[0].imag() == doctest::Approx(-10.0));
        CHECK(std::abs(h[1]) == doctest::Approx(0.0));
    }
}

TEST_CASE("resolvent consistency round trip") {
    OperatorProblem prob = monotone_holder(6, 0.5);
    CounterRng rng(31, 4);
    for (int i = 0; i < 50; ++i) {
        Vector u = rng.normal_vector(6);
        Vector v = rng.normal_vector(6);
        const double a = std::pow(10.0, rng.uniform(-6, 1));
        Vector h = prob.apply_resolvent(u, a, v);
        Vector back = prob.apply_derivative(u, h) + a * h;
        CHECK((back - v).norm() <= 1e-10 * v.norm());
    }
}

TEST_CASE("singular shifted operator raises the dedicated error") {
    Vector d(2);
    d << -0.1, 1.0;
    OperatorProblem prob = diag_problem(d);
    Vector v(2);
    v << 1, 1;
    try {
        prob.apply_resolvent(Vector(Vector::Zero(2)), 0.1, v);
        FAIL("expected ResolventSingularError");
    } catch (const ResolventSingularError& e) {
        CHECK(e.a_abs() == doctest::Approx(0.1));
        CHECK(std::string(e.what()).find("increase r(0)") != std::string::npos);
    }
}

TEST_CASE("shift preconditions") {
    OperatorProblem prob = identity_problem(2);
    Vector v(2);
    v << 1, 1;
    CHECK_THROWS_AS(prob.apply_resolvent(Vector(Vector::Zero(2)), 0.0, v), UsageError);
    CHECK_THROWS_AS(prob.apply_resolvent(Vector(Vector::Zero(2)), 2e3, v), UsageError);
}

TEST_CASE("holder estimation: linear operator returns the clamp convention") {
    CounterRng rng(5, 6);
    Matrix m = rng.normal_matrix(4, 4);
    OperatorProblemConfig cfg{VectorSpace(4)};
    cfg.name = "linear";
    cfg.linear_matrix = m;
    cfg.rhs = Vector::Zero(4);
    cfg.resolvent.eps0 = 1e3;
    OperatorProblem prob(std::move(cfg));
    HolderEstimate est = estimate_holder_constants(prob, 50, 1.0, Vector::Zero(4), 42);
    CHECK(est.c0 == 0.0);
    CHECK(est.kappa == 1.0);
}

TEST_CASE("holder estimation recovers the square-root exponent") {
    OperatorProblem prob = monotone_holder(3, 0.5);
    HolderEstimate est = estimate_holder_constants(prob, 200, 1.0, Vector::Zero(3), 42);
    CHECK(est.kappa >= 0.45);
    CHECK(est.kappa <= 0.55);
    CHECK(est.c0 <= 1.6);
}

TEST_CASE("holder estimation on a quadratic map") {
    // F(u)_i = u_i^2 / 2 has A(u) = diag(u), so the operator-norm difference
    // is the max norm of u - v.
    const int n = 2;
    OperatorProblemConfig cfg{VectorSpace(n)};
    cfg.name = "quadratic";
    cfg.apply = [](const Vector& u) { return Vector(0.5 * u.array().square()); };
    cfg.jacobian = [](const Vector& u) { return Matrix(u.asDiagonal()); };
    cfg.rhs = Vector::Zero(n);
    cfg.resolvent.eps0 = 1e3;
    OperatorProblem prob(std::move(cfg));
    HolderEstimate est = estimate_holder_constants(prob, 200, 1.0, Vector::Zero(n), 42);
    CHECK(est.kappa >= 0.95);
    CHECK(est.kappa <= 1.0);
    CHECK(est.c0 >= 0.9);
    CHECK(est.c0 <= 1.1);
}

TEST_CASE("holder estimation degenerate sample") {
    OperatorProblem prob = monotone_holder(2, 1.0);
    CHECK_THROWS_AS(estimate_holder_constants(prob, 20, 1e-15, Vector::Zero(2), 1),
                    DegenerateSampleError);
    CHECK_THROWS_AS(estimate_holder_constants(prob, 5, 1.0, Vector::Zero(2), 1), UsageError);
}

TEST_CASE("holder bound holds for gallery constants") {
    for (double kappa : {0.5, 1.0}) {
        OperatorProblem prob = monotone_holder(5, kappa);
        const double c0 = prob.smoothness().c0;
        CHECK(c0 == doctest::Approx(1.0 + kappa));
        CounterRng rng(77, 8);
        for (int i = 0; i < 100; ++i) {
            Vector u = rng.in_ball(5, 2.0, Vector::Zero(5));
            Vector v = rng.in_ball(5, 2.0, Vector::Zero(5));
            const double d = (u - v).norm();
            if (d < 1e-12) continue;
            const double num = operator_norm(prob.jacobian_matrix(u) - prob.jacobian_matrix(v));
            CHECK(num <= c0 * std::pow(d, kappa) * (1.0 + 1e-8));
        }
    }
}

TEST_CASE("resolvent bound verification on diag(0, 1)") {
    Vector d(2);
    d << 0, 1;
    OperatorProblem prob = diag_problem(d);
    std::vector<double> grid = {0.9, 0.5, 0.25, 0.1, 0.01, 1e-4};
    ResolventBoundReport rep = verify_resolvent_bound(prob, Vector::Zero(2), grid);
    CHECK(rep.pass);
    CHECK(rep.max_product == doctest::Approx(1.0));
    for (const auto& row : rep.rows) CHECK(row.inverse_norm == doctest::Approx(1.0 / row.r));
}

TEST_CASE("resolvent bound verification under imaginary shifts") {
    Vector d(2);
    d << 0, 1;
    GalleryParams unused;
    OperatorProblemConfig cfg{VectorSpace(2)};
    cfg.name = "diag-imag";
    cfg.linear_matrix = Matrix(d.asDiagonal());
    cfg.rhs = Vector::Zero(2);
    cfg.resolvent = {1.0, 1.0, 1e3, M_PI / 2};
    OperatorProblem prob(std::move(cfg));
    std::vector<double> grid = {0.5, 0.1, 0.01};
    ResolventBoundReport rep = verify_resolvent_bound(prob, Vector::Zero(2), grid);
    CHECK(rep.pass);
    for (const auto& row : rep.rows) CHECK(row.inverse_norm == doctest::Approx(1.0 / row.r));
}

TEST_CASE("resolvent bound verification on random SPSD matrices") {
    CounterRng rng(9, 10);
    for (int inst = 0; inst < 10; ++inst) {
        const int n = rng.uniform_int(2, 12);
        Matrix q = random_orthogonal(n, rng);
        Vector eigs(n);
        for (int i = 0; i < n; ++i)
            eigs[i] = rng.uniform01() < 0.4 ? 0.0 : std::pow(10.0, rng.uniform(-2, 1));
        OperatorProblemConfig cfg{VectorSpace(n)};
        cfg.name = "spsd";
        cfg.linear_matrix = Matrix(q * eigs.asDiagonal() * q.transpose());
        cfg.rhs = Vector::Zero(n);
        cfg.resolvent.eps0 = 1e3;
        OperatorProblem prob(std::move(cfg));
        std::vector<double> grid = {1.0, 0.3, 0.1, 0.01, 1e-3};
        ResolventBoundReport rep = verify_resolvent_bound(prob, Vector::Zero(n), grid);
        CHECK(rep.pass);
    }
}

TEST_CASE("resolvent bound grid precondition") {
    OperatorProblem prob = identity_problem(2);
    std::vector<double> bad = {0.5, 2e3};
    CHECK_THROWS_AS(verify_resolvent_bound(prob, Vector::Zero(2), bad), UsageError);
}

TEST_CASE("non-finite evaluation names the component") {
    OperatorProblemConfig cfg{VectorSpace(2)};
    cfg.name = "nan";
    cfg.apply = [](const Vector& u) {
        Vector out = u;
        out[1] = std::nan("");
        return out;
    };
    cfg.rhs = Vector::Zero(2);
    cfg.resolvent.eps0 = 1e3;
    OperatorProblem prob(std::move(cfg));
    try {
        prob.eval_apply(Vector(Vector::Zero(2)));
        FAIL("expected EvaluationError");
    } catch (const EvaluationError& e) {
        CHECK(std::string(e.what()).find("component 1") != std::string::npos);
    }
}

TEST_CASE("gallery rejects unknown names with the list") {
    try {
        make_gallery("no-such-problem", GalleryParams{});
        FAIL("expected UsageError");
    } catch (const UsageError& e) {
        CHECK(std::string(e.what()).find("monotone-holder") != std::string::npos);
    }
}
