#include "verify.hpp"

#include <cmath>
#include <sstream>

#include "comparison.hpp"
#include "errors.hpp"
#include "gallery.hpp"
#include "path.hpp"
#include "rng.hpp"
#include "runner.hpp"
#include "schedule.hpp"
#include "solver.hpp"

namespace dsm {

using nlohmann::json;

json VerifyReport::to_json() const {
    json rows = json::array();
    for (const VerifyCheck& c : checks)
        rows.push_back(json{{"name", c.name}, {"pass", c.pass}, {"margin", c.margin},
                            {"info", c.info}});
    return json{{"suite", suite}, {"checks", rows}, {"all_pass", all_pass}};
}

std::vector<std::string> verify_suites() {
    return {"all", "operator", "schedule", "lemma1", "path", "theorem"};
}

namespace {

void add(VerifyReport& report, std::string name, bool pass, double margin,
         std::string info = {}) {
    report.all_pass = report.all_pass && pass;
    report.checks.push_back({std::move(name), pass, margin, std::move(info)});
}

// ---- operator suite -------------------------------------------------------

void norm_axioms(VerifyReport& rep, std::uint64_t seed) {
    const double eps = std::numeric_limits<double>::epsilon();
    double worst = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (double p : {2.0, 1.5, 3.0}) {
        VectorSpace space(6, p == 2.0 ? NormKind::L2 : NormKind::Lp, p);
        CounterRng rng(seed, 0x4e4f524dUL + static_cast<std::uint64_t>(p * 10));
        for (int i = 0; i < 200; ++i) {
            Vector u = rng.normal_vector(6), v = rng.normal_vector(6);
            const double s = rng.uniform(-3.0, 3.0);
            const double homog =
                std::abs(space.norm(Vector(s * u)) - std::abs(s) * space.norm(u));
            const double scale = std::max(1.0, space.norm(u) + space.norm(v));
            const double tri =
                space.norm(u) + space.norm(v) - space.norm(Vector(u + v)) + 8 * eps * scale;
            ok = ok && homog <= 8 * eps * scale && tri >= 0.0;
            worst = std::min(worst, tri);
        }
    }
    add(rep, "norm-axioms", ok, worst);
}

void derivative_linearity(VerifyReport& rep, std::uint64_t seed) {
    GalleryParams gp;
    gp.n = 8;
    gp.kappa = 0.7;
    gp.seed = seed;
    OperatorProblem mh = make_gallery("monotone-holder", gp);
    OperatorProblem ms = make_gallery("monotone-smooth", gp);
    CounterRng rng(seed, 0x4c494eUL);
    double worst = 0.0;
    for (const OperatorProblem* prob : {&mh, &ms}) {
        for (int i = 0; i < 50; ++i) {
            Vector u = rng.normal_vector(8), h1 = rng.normal_vector(8), h2 = rng.normal_vector(8);
            const double alpha = rng.uniform(-2, 2), beta = rng.uniform(-2, 2);
            Vector lhs = prob->apply_derivative(u, Vector(alpha * h1 + beta * h2));
            Vector rhs = alpha * prob->apply_derivative(u, h1) + beta * prob->apply_derivative(u, h2);
            worst = std::max(worst, (lhs - rhs).norm() / (h1.norm() + h2.norm()));
        }
    }
    add(rep, "derivative-linearity", worst <= 1e-10, 1e-10 - worst);
}

void resolvent_consistency(VerifyReport& rep, std::uint64_t seed) {
    GalleryParams gp;
    gp.n = 10;
    gp.seed = seed;
    OperatorProblem prob = make_gallery("monotone-smooth", gp);
    CounterRng rng(seed, 0x52455354UL);
    double worst = 0.0;
    for (int i = 0; i < 40; ++i) {
        Vector u = rng.normal_vector(10), v = rng.normal_vector(10);
        const double a = std::pow(10.0, rng.uniform(-6, 0));
        Vector h = prob.apply_resolvent(u, a, v);
        Vector back = prob.apply_derivative(u, h) + a * h;
        worst = std::max(worst, (back - v).norm() / v.norm());
    }
    add(rep, "resolvent-consistency", worst <= 1e-10, 1e-10 - worst);
}

void fd_consistency(VerifyReport& rep, std::uint64_t seed) {
    // ||(F(u+sh)-F(u))/s - A(u)h|| = O(s^kappa).
    bool ok = true;
    double worst = std::numeric_limits<double>::infinity();
    for (double kappa : {1.0, 0.5}) {
        GalleryParams gp;
        gp.n = 6;
        gp.kappa = kappa;
        gp.seed = seed;
        OperatorProblem prob = make_gallery("monotone-holder", gp);
        CounterRng rng(seed, 0x46444331UL);
        for (int i = 0; i < 20; ++i) {
            Vector u = rng.normal_vector(6), h = rng.normal_vector(6);
            Vector ah = prob.apply_derivative(u, h);
            const double scale = 1.0 + ah.norm();
            for (double s : {1e-4, 1e-5, 1e-6}) {
                Vector fd = (prob.eval_apply(Vector(u + s * h)) - prob.eval_apply(u)) / s;
                const double err = (fd - ah).norm();
                // c0 (s ||h||)^kappa ||h|| dominates the remainder.
                const double tol = 4.0 * std::pow(s * h.norm(), kappa) * h.norm() + 1e-9;
                ok = ok && err <= tol * scale;
                worst = std::min(worst, tol * scale - err);
            }
        }
    }
    add(rep, "fd-derivative-consistency", ok, worst);
}

void ray_derivative_equality(VerifyReport& rep, std::uint64_t) {
    // On the fixed-angle ray a(t) = e^{i theta} r(t), the two evaluated
    // derivatives |adot| and |rdot| agree exactly.
    ScheduleInputs in;
    in.g0 = 0.25;
    in.eps0 = 10.0;
    double worst = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (double theta : {0.0, 0.7, M_PI / 2}) {
        in.theta = theta;
        Schedule s = derive_schedule(in);
        const double ct = std::cos(theta), st = std::sin(theta);
        for (double t : {0.0, 0.5, 3.0, 12.0, 200.0}) {
            const double rdot = s.rdot(t);
            const double adot = std::hypot(ct * rdot, st * rdot);
            const double err = std::abs(adot - std::abs(rdot));
            ok = ok && err <= 1e-14 * std::max(1.0, std::abs(rdot));
            worst = std::min(worst, 1e-14 - err);
        }
    }
    add(rep, "ray-derivative-equality", ok, worst);
}

void norm_rate_bound(VerifyReport& rep, std::uint64_t seed) {
    // |(||w(t+s)|| - ||w(t-s)||)/(2s)| <= ||wdot(t)|| + 10 s M with M a
    // curvature bound on the trig test curve.
    bool ok = true;
    double worst = std::numeric_limits<double>::infinity();
    for (double p : {2.0, 1.5, 3.0}) {
        VectorSpace space(4, p == 2.0 ? NormKind::L2 : NormKind::Lp, p);
        CounterRng rng(seed, 0x52415445UL + static_cast<std::uint64_t>(10 * p));
        for (int trial = 0; trial < 25; ++trial) {
            Vector base = rng.normal_vector(4) * 2.0;
            Vector amp1 = rng.normal_vector(4), amp2 = rng.normal_vector(4);
            const double w1 = rng.uniform(0.3, 2.0), w2 = rng.uniform(0.3, 2.0);
            auto curve = [&](double t) {
                return Vector(base + amp1 * std::sin(w1 * t) + amp2 * std::cos(w2 * t));
            };
            auto dcurve = [&](double t) {
                return Vector(amp1 * w1 * std::cos(w1 * t) - amp2 * w2 * std::sin(w2 * t));
            };
            const double m_bound = amp1.norm() * w1 * w1 + amp2.norm() * w2 * w2;
            const double t = rng.uniform(0.0, 5.0);
            if (space.norm(curve(t)) < 1e-6) continue;
            for (double s : {1e-3, 1e-4}) {
                const double fd =
                    (space.norm(curve(t + s)) - space.norm(curve(t - s))) / (2.0 * s);
                const double bound = space.norm(dcurve(t)) + 10.0 * s * m_bound;
                ok = ok && std::abs(fd) <= bound;
                worst = std::min(worst, bound - std::abs(fd));
            }
        }
    }
    add(rep, "norm-rate-bound", ok, worst);
}

void holder_bound(VerifyReport& rep, std::uint64_t seed) {
    bool ok = true;
    double worst = std::numeric_limits<double>::infinity();
    for (double kappa : {0.5, 1.0}) {
        GalleryParams gp;
        gp.n = 6;
        gp.kappa = kappa;
        gp.seed = seed;
        OperatorProblem prob = make_gallery("monotone-holder", gp);
        const double c0 = prob.smoothness().c0;
        CounterRng rng(seed, 0x484f4cUL);
        for (int i = 0; i < 60; ++i) {
            Vector u = rng.in_ball(6, 2.0, Vector::Zero(6));
            Vector v = rng.in_ball(6, 2.0, Vector::Zero(6));
            const double d = (u - v).norm();
            if (d < 1e-12) continue;
            const double num = operator_norm(prob.jacobian_matrix(u) - prob.jacobian_matrix(v));
            const double bound = c0 * std::pow(d, kappa) * (1.0 + 1e-8);
            ok = ok && num <= bound;
            worst = std::min(worst, bound - num);
        }
    }
    add(rep, "holder-bound", ok, worst);
}

void resolvent_bound_spsd(VerifyReport& rep, std::uint64_t seed) {
    CounterRng rng(seed, 0x53505344UL);
    bool ok = true;
    double worst = std::numeric_limits<double>::infinity();
    for (int inst = 0; inst < 20; ++inst) {
        const int n = rng.uniform_int(2, 20);
        Matrix q = random_orthogonal(n, rng);
        Vector eigs(n);
        for (int i = 0; i < n; ++i)
            eigs[i] = rng.uniform01() < 0.3 ? 0.0 : std::pow(10.0, rng.uniform(-3, 1));
        Matrix a = q * eigs.asDiagonal() * q.transpose();
        OperatorProblemConfig cfg{VectorSpace(n)};
        cfg.name = "spsd";
        cfg.linear_matrix = a;
        cfg.rhs = Vector::Zero(n);
        cfg.resolvent = {1.0, 1.0, 1e3, 0.0};
        OperatorProblem prob(std::move(cfg));
        std::vector<double> grid;
        for (double r = 1e-4; r <= 1.0; r *= 10.0) grid.push_back(r);
        ResolventBoundReport report = verify_resolvent_bound(prob, Vector::Zero(n), grid);
        ok = ok && report.pass;
        worst = std::min(worst, 1.0 + 1e-8 - report.max_product);
    }
    add(rep, "resolvent-bound-spsd", ok, worst);
}

void operator_suite(VerifyReport& rep, std::uint64_t seed) {
    norm_axioms(rep, seed);
    derivative_linearity(rep, seed);
    resolvent_consistency(rep, seed);
    fd_consistency(rep, seed);
    ray_derivative_equality(rep, seed);
    norm_rate_bound(rep, seed);
    holder_bound(rep, seed);
    resolvent_bound_spsd(rep, seed);
}

// ---- schedule suite -------------------------------------------------------

void exponent_identities(VerifyReport& rep, std::uint64_t seed) {
    CounterRng rng(seed, 0x4944454eUL);
    double worst = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (int i = 0; i < 1000; ++i) {
        const double b = rng.uniform(1e-6, 3.0);
        const double kappa = rng.uniform(1e-6, 1.0);
        const double p = 1.0 + kappa;
        const double k = derive_exponent(b, kappa);
        const double e1 = std::abs((k + b) - (k * p - 1.0)) / std::max(1.0, k + b);
        const double e2 = std::abs((k * (p - 1.0) - 2.0) - (b - 1.0)) / std::max(1.0, std::abs(b - 1.0) + 1.0);
        const double pos = kappa + (1.0 - kappa) * b;
        const double kp2 = k * p - 2.0;
        ok = ok && e1 <= 1e-12 && e2 <= 1e-12 && pos > 0.0 && kp2 > 0.0;
        worst = std::min({worst, 1e-12 - e1, 1e-12 - e2, pos, kp2});
    }
    add(rep, "exponent-identities", ok, worst, "1000 random (b, kappa)");
}

ScheduleInputs worked_inputs() {
    ScheduleInputs in;
    in.b = 1.0;
    in.kappa = 1.0;
    in.c0 = 0.0;
    in.c1 = 1.0;
    in.c2 = 1.0;
    in.g0 = 0.25;
    in.r0 = 1.0;
    in.eps0 = 10.0;
    return in;
}

void decay_balance_exactness(VerifyReport& rep, std::uint64_t seed) {
    CounterRng rng(seed, 0x42414cUL);
    double worst = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (int inst = 0; inst < 10; ++inst) {
        ScheduleInputs in = worked_inputs();
        in.b = rng.uniform(0.2, 2.5);
        in.kappa = rng.uniform(0.1, 1.0);
        in.c2 = rng.uniform(0.5, 3.0);
        in.g0 = rng.uniform(0.05, 1.0);
        in.r0 = rng.uniform(0.5, 5.0);
        Schedule s = derive_schedule(in);
        for (int j = 0; j < 100; ++j) {
            const double t = std::pow(10.0, rng.uniform(-2, 6)) - 0.01;
            const double lhs = s.c4() * std::abs(s.rdot(t)) / std::pow(s.r(t), s.k() * s.p() - 1.0);
            const double err = std::abs(lhs - Schedule::decay_balance) / Schedule::decay_balance;
            ok = ok && err <= 1e-10;
            worst = std::min(worst, 1e-10 - err);
        }
    }
    add(rep, "decay-balance-exactness", ok, worst);
}

void rate_identity(VerifyReport& rep, std::uint64_t) {
    Schedule s = derive_schedule(worked_inputs());
    double worst = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (double t : {0.0, 0.3, 1.0, 7.0, 55.0, 1234.0}) {
        const double lhs = s.k() * std::abs(s.rdot(t)) / s.r(t);
        const double rhs = s.k() * std::pow(s.r(t), s.kp_minus_2()) / (4.0 * s.c4());
        const double err = std::abs(lhs - rhs) / std::max(1e-300, rhs);
        ok = ok && err <= 1e-12;
        worst = std::min(worst, 1e-12 - err);
    }
    add(rep, "rate-identity", ok, worst);
}

void schedule_monotonicity(VerifyReport& rep, std::uint64_t) {
    Schedule s = derive_schedule(worked_inputs());
    bool ok = true;
    double prev_r = std::numeric_limits<double>::infinity();
    double prev_ad = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 2000; ++i) {
        const double t = 0.05 * i;
        const double r = s.r(t);
        const double ad = std::abs(s.rdot(t));
        ok = ok && r > 0.0 && r < prev_r && ad < prev_ad && s.rdot(t) < 0.0;
        prev_r = r;
        prev_ad = ad;
    }
    add(rep, "decay-monotonicity", ok, ok ? 1.0 : -1.0, "dense grid, 2000 points");
}

void majorant_condition(VerifyReport& rep, std::uint64_t seed) {
    // Whenever the gates pass, the majorant inequality holds pointwise with
    // the schedule identifications. Randomized over problem constants.
    CounterRng rng(seed, 0x4d414aUL);
    bool ok = true;
    double worst = std::numeric_limits<double>::infinity();
    int tried = 0;
    for (int inst = 0; inst < 40; ++inst) {
        ScheduleInputs in;
        in.b = rng.uniform(0.3, 2.0);
        in.kappa = rng.uniform(0.15, 1.0);
        in.c0 = rng.uniform(0.0, 2.0);
        in.c1 = rng.uniform(0.5, 2.0);
        in.c2 = rng.uniform(0.5, 3.0);
        const double k = derive_exponent(in.b, in.kappa);
        const double threshold =
            in.c0 == 0.0 ? 0.0
                         : std::pow(4.0 * in.c0 * in.c1 *
                                        std::pow(2.0 * in.c2 / k, in.kappa),
                                    1.0 / (in.kappa + (1.0 - in.kappa) * in.b));
        in.r0 = std::max(1.05 * threshold, rng.uniform(0.5, 2.0));
        in.eps0 = 10.0 * in.r0;
        in.g0 = 0.5 * (in.c2 / k) * std::pow(in.r0, -std::abs(in.b - 1.0));
        Schedule s = derive_schedule(in);
        GateReport gates = validate_initial_conditions(s, in);
        if (!gates.all_pass) continue;
        ++tried;
        const double horizon = s.time_for_radius(in.r0 / 50.0);
        std::vector<double> grid;
        grid.push_back(0.0);
        for (int j = 1; j <= 60; ++j)
            grid.push_back(horizon * std::pow(horizon * 1e6, (j - 60) / 60.0));
        std::sort(grid.begin(), grid.end());
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
        InequalityInstance inst9 = schedule_instance(s, in.g0, horizon, grid);
        ConditionReport cond = check_conditions(inst9);
        ok = ok && cond.condition9_margin >= -1e-12 && cond.condition10_ok;
        worst = std::min(worst, cond.condition9_margin);
    }
    std::ostringstream info;
    info << tried << " gate-passing random instances";
    add(rep, "majorant-condition", ok && tried >= 20, worst, info.str());
}

void schedule_suite(VerifyReport& rep, std::uint64_t seed) {
    exponent_identities(rep, seed);
    decay_balance_exactness(rep, seed);
    rate_identity(rep, seed);
    schedule_monotonicity(rep, seed);
    majorant_condition(rep, seed);
}

// ---- lemma1 suite ---------------------------------------------------------

std::vector<double> uniform_grid(double t_end, int m) {
    std::vector<double> g(m + 1);
    for (int i = 0; i <= m; ++i) g[i] = t_end * i / m;
    return g;
}

void logistic_case(VerifyReport& rep, std::uint64_t) {
    InequalityInstance inst = make_power_law_instance(
        [](double) { return 1.0; }, [](double) { return 1.0; }, 2.0,
        [](double) { return 0.0; }, [](double) { return 2.0; }, 0.5, 2.0, uniform_grid(2.0, 40));
    PhiTrajectory phi = integrate_phi(inst);
    double worst = std::numeric_limits<double>::infinity();
    bool ok = !phi.blew_up;
    for (std::size_t i = 0; i < phi.t.size(); ++i) {
        const double exact = 1.0 / (1.0 + std::exp(phi.t[i]));
        const double err = std::abs(phi.phi[i] - exact);
        ok = ok && err <= 1e-8;
        worst = std::min(worst, 1e-8 - err);
    }
    add(rep, "logistic-closed-form", ok, worst);
}

void random_sandwich(VerifyReport& rep, std::uint64_t seed, int count) {
    CounterRng rng(seed, 0x53414e44UL);
    bool ok = true;
    double worst = std::numeric_limits<double>::infinity();
    for (int inst_i = 0; inst_i < count; ++inst_i) {
        // mu = mu0 (1 + c t)^m, gamma = m c + delta; alpha and beta sized to
        // leave a positive share of the majorant slack.
        const double mu0 = rng.uniform(0.5, 4.0);
        const double c = rng.uniform(0.1, 1.0);
        const double m = rng.uniform(0.2, 2.0);
        const double delta = rng.uniform(0.1, 1.0);
        const double p = rng.uniform(1.0 + 1e-6, 2.0);
        const double s_alpha = rng.uniform(0.0, 0.45);
        const double s_beta = rng.uniform(0.0, 0.45);
        const double gamma0 = m * c + delta;
        const double g0 = rng.uniform(0.0, 1.0) / mu0;
        auto mu = [mu0, c, m](double t) { return mu0 * std::pow(1.0 + c * t, m); };
        auto mudot_over_mu = [c, m](double t) { return m * c / (1.0 + c * t); };
        auto alpha_t = [=](double t) {
            return s_alpha * (gamma0 - mudot_over_mu(t)) * std::pow(mu(t), p - 1.0);
        };
        auto beta = [=](double t) { return s_beta * (gamma0 - mudot_over_mu(t)) / mu(t); };

        const double horizon = 5.0;
        InequalityInstance inst = make_power_law_instance(
            [gamma0](double) { return gamma0; }, alpha_t, p, beta, mu, g0, horizon,
            uniform_grid(horizon, 50));
        inst.mu_dot = [=](double t) { return mudot_over_mu(t) * mu(t); };

        ConditionReport cond = check_conditions(inst);
        if (!(cond.condition9_margin >= 0.0 && cond.condition10_ok)) {
            ok = false;
            worst = std::min(worst, cond.condition9_margin);
            continue;
        }

        // g obeys the inequality with strict slack; integrate it separately.
        const double slack = rng.uniform(0.1, 0.9);
        InequalityInstance g_inst = inst;
        g_inst.beta = [beta, slack](double t) { return (1.0 - slack) * beta(t); };
        PhiTrajectory g_run = integrate_phi(g_inst);
        PhiTrajectory phi = integrate_phi(inst);
        Certificate cert = verify_sandwich(g_run.phi, inst, {}, &phi);
        ok = ok && cert.passed() && !g_run.blew_up;
        worst = std::min(worst, -cert.max_violation);
    }
    std::ostringstream info;
    info << count << " randomized passing instances";
    add(rep, "random-sandwich", ok, worst, info.str());
}

void beta_monotonicity(VerifyReport& rep, std::uint64_t seed) {
    CounterRng rng(seed, 0x42455441UL);
    bool ok = true;
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 20; ++i) {
        const double b1 = rng.uniform(0.0, 1.0);
        const double b2 = b1 + rng.uniform(0.0, 1.0);
        const double g0 = rng.uniform(0.0, 0.5);
        auto make = [&](double bv) {
            return make_power_law_instance([](double) { return 1.0; },
                                           [](double) { return 0.3; }, 1.7,
                                           [bv](double) { return bv; },
                                           [](double) { return 1.0; }, g0, 3.0,
                                           uniform_grid(3.0, 30));
        };
        PhiTrajectory p1 = integrate_phi(make(b1));
        PhiTrajectory p2 = integrate_phi(make(b2));
        for (std::size_t j = 0; j < p1.phi.size(); ++j) {
            const double slack = p2.phi[j] + 1e-9 - p1.phi[j];
            ok = ok && slack >= 0.0;
            worst = std::min(worst, slack);
        }
    }
    add(rep, "beta-monotonicity", ok, worst);
}

void grid_refinement(VerifyReport& rep, std::uint64_t) {
    auto make = [&](int m) {
        return make_power_law_instance([](double) { return 1.0; }, [](double) { return 1.0; },
                                       2.0, [](double) { return 0.05; },
                                       [](double) { return 2.0; }, 0.4, 2.0, uniform_grid(2.0, m));
    };
    PhiTrajectory coarse = integrate_phi(make(25));
    PhiTrajectory fine = integrate_phi(make(50));
    bool ok = true;
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < coarse.t.size(); ++i) {
        const double a = coarse.phi[i];
        const double b = fine.phi[2 * i];
        const double rel = std::abs(a - b) / std::max(1e-30, std::abs(b));
        ok = ok && rel <= 1e-8;
        worst = std::min(worst, 1e-8 - rel);
    }
    add(rep, "grid-refinement", ok, worst);
}

void lemma1_suite(VerifyReport& rep, std::uint64_t seed) {
    logistic_case(rep, seed);
    random_sandwich(rep, seed, 100);
    beta_monotonicity(rep, seed);
    grid_refinement(rep, seed);
}

// ---- path suite -----------------------------------------------------------

void linear_path_closed_form(VerifyReport& rep, std::uint64_t) {
    OperatorProblemConfig cfg{VectorSpace(1)};
    cfg.name = "scalar-identity";
    cfg.linear_matrix = Matrix::Identity(1, 1);
    cfg.rhs = Vector::Ones(1);
    cfg.resolvent.eps0 = 1e3;
    OperatorProblem prob(std::move(cfg));
    std::vector<double> moduli = default_path_moduli(1.0);
    RegularizedPath path = track_path(prob, moduli, Vector::Zero(1));
    bool ok = !path.aborted && path.entries.size() == moduli.size();
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < path.entries.size(); ++i) {
        const double a = std::abs(path.entries[i].a);
        const double err = std::abs(path.entries[i].w[0] - 1.0 / (1.0 + a));
        ok = ok && err <= 1e-10;
        worst = std::min(worst, 1e-10 - err);
    }
    add(rep, "linear-path-closed-form", ok, worst);
}

void warm_start_iterations(VerifyReport& rep, std::uint64_t seed) {
    GalleryParams gp;
    gp.n = 12;
    gp.kappa = 0.5;
    gp.seed = seed;
    OperatorProblem prob = make_gallery("monotone-holder", gp);
    RegularizedPath path = track_path(prob, default_path_moduli(2.0), Vector::Zero(12));
    bool ok = !path.aborted;
    int max_iters = 0;
    for (std::size_t i = 1; i < path.entries.size(); ++i)
        max_iters = std::max(max_iters, path.entries[i].newton_iters);
    ok = ok && max_iters <= 10;
    add(rep, "warm-start-iterations", ok, 10.0 - max_iters, "ratio-1/2 continuation");
}

void pseudoinverse_oracle(VerifyReport& rep, std::uint64_t seed) {
    bool ok = true;
    double worst = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 10; ++trial) {
        GalleryParams gp;
        gp.n = 5;
        gp.rank = 3;
        gp.seed = seed + trial;
        RankDeficientFactors fac = rank_deficient_factors(gp);
        Matrix a = fac.u * fac.sigma.asDiagonal() * fac.v.transpose();
        Vector f = a * fac.x0;
        std::vector<double> shifts;
        for (double s = 1.0; s >= 1e-8; s *= 0.25) shifts.push_back(s);
        shifts.push_back(1e-8);
        NormalSolutionResult res = normal_solution(a, f, shifts);
        Vector pinv = Vector::Zero(5);
        for (int i = 0; i < 5; ++i)
            if (fac.sigma[i] != 0.0)
                pinv += (fac.u.col(i).dot(f) / fac.sigma[i]) * fac.v.col(i);
        const double err = (res.y - pinv).norm();
        ok = ok && err <= 1e-6;
        worst = std::min(worst, 1e-6 - err);
    }
    add(rep, "pseudoinverse-limit", ok, worst);
}

void minimal_norm_property(VerifyReport& rep, std::uint64_t seed) {
    GalleryParams gp;
    gp.n = 5;
    gp.rank = 3;
    gp.seed = seed;
    OperatorProblem prob = make_gallery("rank-deficient-linear", gp);
    const Matrix& a = prob.linear_matrix();
    const Vector& f = prob.rhs();
    std::vector<double> shifts;
    for (double s = 1.0; s >= 1e-9; s *= 0.25) shifts.push_back(s);
    NormalSolutionResult res = normal_solution(a, f, shifts);
    CounterRng rng(seed, 0x4d494eUL);
    bool ok = true;
    double worst = std::numeric_limits<double>::infinity();
    const double base_res = (a * res.y - f).norm();
    for (int i = 0; i < 200; ++i) {
        Vector x = res.y + rng.normal_vector(5);
        if ((a * x - f).norm() > base_res + 1e-10) continue;
        const double slack = x.norm() + 1e-6 - res.y.norm();
        ok = ok && slack >= 0.0;
        worst = std::min(worst, slack);
    }
    add(rep, "minimal-norm-property", ok, worst);
}

void derivative_check(VerifyReport& rep, std::uint64_t seed) {
    GalleryParams gp;
    gp.n = 6;
    gp.kappa = 1.0;
    gp.seed = seed;
    OperatorProblem prob = make_gallery("monotone-holder", gp);
    SolveArgs args;
    args.seed = seed;
    RunPlan plan = plan_run(prob, args);
    // Fine path aligned with the schedule for tighter finite differences.
    std::vector<double> moduli;
    for (double r = plan.inputs.r0; r > plan.inputs.r0 * 1e-3; r *= 0.9) moduli.push_back(r);
    RegularizedPath path = track_path(prob, moduli, plan.u0);
    PathDerivativeReport report = path_derivative_check(prob, path, plan.schedule);
    add(rep, "path-derivative-agreement", report.all_agree && !report.rows.empty(),
        report.all_agree ? 1.0 : -1.0);
    add(rep, "path-derivative-bounds", report.bounds_pass && !report.rows.empty(),
        report.bounds_pass ? 1.0 : -1.0);
}

void path_suite(VerifyReport& rep, std::uint64_t seed) {
    linear_path_closed_form(rep, seed);
    warm_start_iterations(rep, seed);
    pseudoinverse_oracle(rep, seed);
    minimal_norm_property(rep, seed);
    derivative_check(rep, seed);
}

// ---- theorem suite --------------------------------------------------------

void theorem_runs(VerifyReport& rep, std::uint64_t seed) {
    struct Case {
        std::string name;
        GalleryParams params;
    };
    std::vector<Case> cases;
    {
        GalleryParams a;
        a.n = 2;
        a.kappa = 1.0;
        a.seed = seed;
        cases.push_back({"monotone-holder", a});
        GalleryParams b;
        b.n = 8;
        b.kappa = 0.5;
        b.seed = seed;
        cases.push_back({"monotone-holder", b});
        GalleryParams c;
        c.n = 8;
        c.seed = seed;
        cases.push_back({"wellposed-linear", c});
    }
    for (const Case& cs : cases) {
        OperatorProblem prob = make_gallery(cs.name, cs.params);
        SolveArgs args;
        args.seed = seed;
        RunPlan plan = plan_run(prob, args);
        std::ostringstream label;
        label << cs.name << "-n" << cs.params.n << "-kappa" << cs.params.kappa;
        if (!plan.gates.all_pass) {
            add(rep, "gates-" + label.str(), false, -1.0, "planner could not satisfy the gates");
            continue;
        }
        IntegratorConfig cfg = plan.integrator;
        cfg.rel_tol = 1e-10;
        cfg.abs_tol = 1e-12;
        cfg.oracle_samples = 36;
        cfg.stop_residual = 0.0;
        cfg.t_max = plan.schedule.time_for_radius(plan.inputs.r0 / 20.0);
        Trajectory traj = dsm_solve(prob, plan.schedule, plan.u0, cfg, true);

        EnvelopeReport env = envelope_check(traj);
        add(rep, "envelope-" + label.str(), env.pass, env.min_rel_slack);

        MasterInequalityReport audit =
            master_inequality_audit(traj, plan.schedule, prob.norm(prob.rhs()));
        add(rep, "master-inequality-" + label.str(), audit.pass && !audit.rows.empty(),
            audit.rows.empty() ? -1.0 : 10.0 - audit.worst_ratio);

        const double bound = traj.max_w_norm + plan.schedule.envelope(0.0) + 1e-9;
        add(rep, "boundedness-" + label.str(), traj.max_u_norm <= bound,
            bound - traj.max_u_norm);

        // Convergence toward y over a longer horizon.
        IntegratorConfig cfg2 = plan.integrator;
        cfg2.stop_residual = 0.0;
        cfg2.oracle_samples = 0;
        cfg2.audit_triplets = false;
        cfg2.t_max = plan.schedule.time_for_radius(plan.r_target);
        Trajectory long_run = dsm_solve(prob, plan.schedule, plan.u0, cfg2, false);
        const Vector& y = *prob.known_solution();
        const double dist = prob.norm(Vector(long_run.u_final - y));
        const double tol = 1e-3 * (1.0 + prob.norm(y));
        add(rep, "convergence-" + label.str(),
            long_run.status == SolveStatus::HorizonReached && dist <= tol, tol - dist);
    }
}

} // namespace

VerifyReport run_verify(const std::string& suite, std::uint64_t seed) {
    VerifyReport rep;
    rep.suite = suite;
    if (suite == "operator") {
        operator_suite(rep, seed);
    } else if (suite == "schedule") {
        schedule_suite(rep, seed);
    } else if (suite == "lemma1") {
        lemma1_suite(rep, seed);
    } else if (suite == "path") {
        path_suite(rep, seed);
    } else if (suite == "theorem") {
        theorem_runs(rep, seed);
    } else if (suite == "all") {
        operator_suite(rep, seed);
        schedule_suite(rep, seed);
        lemma1_suite(rep, seed);
        path_suite(rep, seed);
        theorem_runs(rep, seed);
    } else {
        throw UsageError("unknown verify suite '" + suite +
                         "' (all, operator, schedule, lemma1, path, theorem)");
    }
    return rep;
}

} // namespace dsm
