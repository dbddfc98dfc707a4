#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <Eigen/SVD>
#include <nlohmann/json.hpp>

#include "bench.hpp"
#include "errors.hpp"
#include "gallery.hpp"
#include "manifest.hpp"
#include "problem_io.hpp"
#include "runner.hpp"
#include "verify.hpp"

using namespace dsm;
using nlohmann::json;

namespace {

std::filesystem::path temp_dir(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() / ("dsm-test-" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), {});
}

} // namespace

TEST_CASE("gallery worked examples") {
    SUBCASE("monotone-holder n=2 builds f = F(y) for y = (1, -1)") {
        GalleryParams p;
        p.n = 2;
        p.kappa = 1.0;
        OperatorProblem prob = make_gallery("monotone-holder", p);
        REQUIRE(prob.known_solution().has_value());
        CHECK((*prob.known_solution())[0] == 1.0);
        CHECK((*prob.known_solution())[1] == -1.0);
        CHECK(prob.rhs()[0] == doctest::Approx(2.0));
        CHECK(prob.rhs()[1] == doctest::Approx(-2.0));
    }
    SUBCASE("wellposed-linear n=1 is the doubling map") {
        GalleryParams p;
        p.n = 1;
        OperatorProblem prob = make_gallery("wellposed-linear", p);
        CHECK(prob.linear_matrix()(0, 0) == doctest::Approx(2.0));
        CHECK((*prob.known_solution())[0] == 1.0);
        CHECK(prob.rhs()[0] == doctest::Approx(2.0));
    }
    SUBCASE("rank-deficient-linear has exactly two vanishing singular values") {
        GalleryParams p;
        p.n = 5;
        p.rank = 3;
        p.seed = 12345;
        OperatorProblem prob = make_gallery("rank-deficient-linear", p);
        Eigen::JacobiSVD<Matrix> svd(prob.linear_matrix());
        int tiny = 0;
        for (int i = 0; i < 5; ++i)
            if (svd.singularValues()[i] < 1e-14) ++tiny;
        CHECK(tiny == 2);
    }
}

TEST_CASE("gallery problems satisfy the operator-core invariants before use") {
    CounterRng rng(21, 0);
    for (const std::string& name : gallery_names()) {
        GalleryParams p;
        p.n = 5;
        p.kappa = 0.5;
        OperatorProblem prob = make_gallery(name, p);
        const int n = prob.dimension();
        // derivative consistency
        for (int i = 0; i < 10; ++i) {
            Vector u = rng.normal_vector(n);
            Vector h = rng.normal_vector(n);
            Vector ah = prob.apply_derivative(u, h);
            const double s = 1e-6;
            Vector fd = (prob.eval_apply(Vector(u + s * h)) - prob.eval_apply(u)) / s;
            const double tol = 4.0 * std::pow(s * h.norm(), prob.smoothness().kappa) * h.norm() +
                               1e-7 * h.norm();
            CHECK((fd - ah).norm() <= tol * (1.0 + ah.norm()));
        }
        // Holder bound with the asserted constants
        const double c0 = prob.smoothness().c0;
        const double kappa = prob.smoothness().kappa;
        for (int i = 0; i < 20; ++i) {
            Vector u = rng.in_ball(n, 1.5, Vector::Zero(n));
            Vector v = rng.in_ball(n, 1.5, Vector::Zero(n));
            const double d = prob.norm(Vector(u - v));
            if (d < 1e-12) continue;
            const double num =
                operator_norm(prob.jacobian_matrix(u) - prob.jacobian_matrix(v));
            CHECK(num <= c0 * std::pow(d, kappa) * (1.0 + 1e-8) + 1e-13);
        }
    }
}

TEST_CASE("problem files round-trip through JSON") {
    auto dir = temp_dir("io");
    SUBCASE("gallery descriptor") {
        json doc = problem_descriptor("monotone-holder", GalleryParams{});
        doc["params"]["kappa"] = 0.5;
        doc["n"] = 4;
        const auto file = dir / "prob.json";
        write_file_atomic(file.string(), doc.dump(2));
        OperatorProblem prob = load_problem(file.string());
        CHECK(prob.name() == "monotone-holder");
        CHECK(prob.dimension() == 4);
        CHECK(prob.smoothness().kappa == doctest::Approx(0.5));
        // identical to a direct construction
        GalleryParams p;
        p.n = 4;
        p.kappa = 0.5;
        OperatorProblem direct = make_gallery("monotone-holder", p);
        CounterRng rng(2, 2);
        Vector u = rng.normal_vector(4);
        CHECK((prob.eval_apply(u) - direct.eval_apply(u)).norm() == 0.0);
    }
    SUBCASE("matrix problem with row-major data") {
        json doc;
        doc["kind"] = "matrix";
        doc["n"] = 2;
        doc["data"] = {1.0, 2.0, 3.0, 4.0};
        doc["f"] = {1.0, 1.0};
        doc["y"] = {0.5, 0.25};
        doc["asserted_constants"] = {{"c0", 0.0}, {"kappa", 1.0}, {"c1", 1.0},
                                     {"b", 1.0},  {"eps0", 100.0}, {"theta", 0.0}};
        const auto file = dir / "matrix.json";
        write_file_atomic(file.string(), doc.dump());
        OperatorProblem prob = load_problem(file.string());
        Vector u(2);
        u << 1, 1;
        Vector out = prob.eval_apply(u);
        CHECK(out[0] == doctest::Approx(3.0));
        CHECK(out[1] == doctest::Approx(7.0));
        CHECK(prob.provenance() == ConstantProvenance::Asserted);
    }
    SUBCASE("missing file raises IoError") {
        CHECK_THROWS_AS(load_problem((dir / "absent.json").string()), IoError);
    }
}

TEST_CASE("planner satisfies the gates on gallery defaults") {
    for (double kappa : {0.5, 1.0}) {
        GalleryParams p;
        p.n = 16;
        p.kappa = kappa;
        OperatorProblem prob = make_gallery("monotone-holder", p);
        SolveArgs args;
        RunPlan plan = plan_run(prob, args);
        CHECK(plan.gates.all_pass);
        CHECK(plan.inputs.r0 < prob.resolvent().eps0);
        // c2 covers the measured path with headroom
        CHECK(plan.inputs.c2 >=
              prob.resolvent().c1 * plan.coarse_path.max_w_norm * (1.0 - 1e-12));
    }
}

TEST_CASE("g0 floor engages when starting on the path") {
    GalleryParams p;
    p.n = 3;
    p.kappa = 1.0;
    OperatorProblem prob = make_gallery("monotone-holder", p);
    RegularizedSolve w0 = solve_regularized(prob, 1.0, Vector(Vector::Zero(3)));
    SolveArgs args;
    args.r0 = 1.0;
    args.c0 = 0.0; // keep gate three trivial so r0 = 1 stands
    args.u0 = std::vector<double>(w0.w.data(), w0.w.data() + 3);
    RunPlan plan = plan_run(prob, args);
    CHECK(plan.g0_floor_applied);
    CHECK(plan.inputs.g0 == doctest::Approx(1e-8));
    CHECK(std::isfinite(plan.schedule.lambda()));
}

TEST_CASE("run_solve writes trace, path and manifest; gate failure exits 2") {
    auto dir = temp_dir("run");
    GalleryParams p;
    p.n = 2;
    p.kappa = 1.0;
    OperatorProblem prob = make_gallery("monotone-holder", p);
    json desc = problem_descriptor("monotone-holder", p);

    SUBCASE("default run converges with exit 0") {
        SolveArgs args;
        SolveOutcome out = run_solve(prob, desc, args, (dir / "ok").string());
        CHECK(out.exit_code == 0);
        CHECK(out.manifest["status"] == "Converged");
        CHECK(std::filesystem::exists(dir / "ok" / "trace.csv"));
        CHECK(std::filesystem::exists(dir / "ok" / "path.csv"));
        CHECK(std::filesystem::exists(dir / "ok" / "manifest.json"));
        const std::string trace = slurp(dir / "ok" / "trace.csv");
        CHECK(trace.rfind("t,r,residual,envelope,dist_to_w,dist_to_y\n", 0) == 0);
        // final residual honors the stop rule
        const double fr = out.manifest["metrics"]["final_residual"].get<double>();
        CHECK(fr <= 1e-8 * (1.0 + prob.norm(prob.rhs())));
    }
    SUBCASE("oversized pinned g0 blocks with exit 2 and names the gate") {
        SolveArgs args;
        args.g0 = 1e6;
        SolveOutcome out = run_solve(prob, desc, args, (dir / "gate").string());
        CHECK(out.exit_code == 2);
        CHECK(out.gates_blocked);
        CHECK(out.manifest["gate_failure"].get<std::string>().find("initial-distance") !=
              std::string::npos);
        CHECK_FALSE(std::filesystem::exists(dir / "gate" / "trace.csv"));
    }
    SUBCASE("--force proceeds despite failing gates") {
        SolveArgs args;
        args.g0 = 1e6;
        args.force = true;
        SolveOutcome out = run_solve(prob, desc, args, "");
        CHECK_FALSE(out.gates_blocked);
        CHECK(out.manifest.contains("gates_forced"));
    }
}

TEST_CASE("identical manifests reproduce byte-identical traces") {
    auto dir = temp_dir("repro");
    GalleryParams p;
    p.n = 4;
    p.kappa = 0.5;
    OperatorProblem prob = make_gallery("monotone-holder", p);
    json desc = problem_descriptor("monotone-holder", p);
    SolveArgs args;
    args.seed = 7;
    SolveOutcome a = run_solve(prob, desc, args, (dir / "a").string());
    REQUIRE(a.exit_code == 0);
    // Re-run from the recorded manifest args against the recorded problem.
    SolveArgs replay = SolveArgs::from_json(a.manifest["args"]);
    OperatorProblem prob2 = problem_from_json(a.manifest["problem"]);
    SolveOutcome b = run_solve(prob2, a.manifest["problem"], replay, (dir / "b").string());
    CHECK(slurp(dir / "a" / "trace.csv") == slurp(dir / "b" / "trace.csv"));
    CHECK(slurp(dir / "a" / "path.csv") == slurp(dir / "b" / "path.csv"));
    CHECK(a.manifest.dump() == b.manifest.dump());
}

TEST_CASE("run_schedule reports constants and gates") {
    GalleryParams p;
    p.n = 2;
    p.kappa = 1.0;
    OperatorProblem prob = make_gallery("monotone-holder", p);
    SolveArgs args;
    json doc = run_schedule(prob, problem_descriptor("monotone-holder", p), args);
    CHECK(doc["gates"]["all_pass"].get<bool>());
    CHECK(doc["schedule"]["decay_balance"].get<double>() == 0.25);
    const double k = doc["schedule"]["k"].get<double>();
    CHECK(k == doctest::Approx(2.0)); // b = 1, kappa = 1
}

TEST_CASE("verify suites: schedule and lemma1 pass") {
    VerifyReport sched = run_verify("schedule", 1);
    CHECK(sched.all_pass);
    VerifyReport lemma = run_verify("lemma1", 1);
    CHECK(lemma.all_pass);
    CHECK_THROWS_AS(run_verify("bogus", 1), UsageError);
}

TEST_CASE("bench: degenerate baseline list produces a one-row table") {
    GalleryParams p;
    p.n = 4;
    p.kappa = 1.0;
    OperatorProblem prob = make_gallery("monotone-holder", p);
    SolveArgs args;
    BenchReport rep = run_bench(prob, {}, args);
    REQUIRE(rep.rows.size() == 1);
    CHECK(rep.rows[0].method == "dsm");
    CHECK(rep.rows[0].converged);
    CHECK(rep.table.find("dsm") != std::string::npos);
    CHECK_THROWS_AS(run_bench(prob, {"nonsense"}, args), UsageError);
}

TEST_CASE("bench: plain newton fails on the ill-posed kernel, flow improves") {
    GalleryParams p;
    p.n = 16;
    OperatorProblem prob = make_gallery("illposed-kernel", p);
    SolveArgs args;
    BenchReport rep = run_bench(prob, {"newton-plain", "geometric-a"}, args);
    REQUIRE(rep.rows.size() == 3);
    // recorded, not asserted: the run notes what happened
    const BenchRow& newton = rep.rows[1];
    CHECK(newton.method == "newton-plain");
    CHECK_FALSE(newton.converged);
}

TEST_CASE("atomic writes leave no temporary behind") {
    auto dir = temp_dir("atomic");
    const auto file = dir / "x.csv";
    write_file_atomic(file.string(), "a,b\n1,2\n");
    CHECK(slurp(file) == "a,b\n1,2\n");
    CHECK_FALSE(std::filesystem::exists(dir / "x.csv.tmp"));
}
