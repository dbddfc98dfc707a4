// Command-line front end. Talks to the solver library exclusively through
// the public C interface in dsm/dsm.h; flags mirror the manifest keys.

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dsm/dsm.h"

namespace {

struct OptionsDeleter {
    void operator()(dsm_options* o) const { dsm_options_free(o); }
};
struct ReportDeleter {
    void operator()(dsm_report* r) const { dsm_report_free(r); }
};
using Options = std::unique_ptr<dsm_options, OptionsDeleter>;
using Report = std::unique_ptr<dsm_report, ReportDeleter>;

// Collects flag values and forwards only the ones the user actually set.
struct Knobs {
    CLI::App* cmd = nullptr;
    std::vector<std::pair<std::string, double>> doubles;
    std::vector<std::pair<std::string, std::int64_t>> ints;
    std::vector<std::pair<std::string, std::string>> strings;

    void add_double(const std::string& flag, const std::string& key, const std::string& help) {
        cmd->add_option_function<double>(
               flag, [this, key](double v) { doubles.emplace_back(key, v); }, help)
            ->expected(1);
    }
    void add_int(const std::string& flag, const std::string& key, const std::string& help) {
        cmd->add_option_function<std::int64_t>(
               flag, [this, key](std::int64_t v) { ints.emplace_back(key, v); }, help)
            ->expected(1);
    }
    void add_flag(const std::string& flag, const std::string& key, const std::string& help) {
        cmd->add_flag_function(
            flag, [this, key](std::int64_t v) { ints.emplace_back(key, v > 0 ? 1 : 0); }, help);
    }
    void add_string(const std::string& flag, const std::string& key, const std::string& help) {
        cmd->add_option_function<std::string>(
               flag, [this, key](const std::string& v) { strings.emplace_back(key, v); }, help)
            ->expected(1);
    }

    Options build() const {
        Options opt(dsm_options_create());
        for (const auto& [k, v] : doubles) dsm_options_set_double(opt.get(), k.c_str(), v);
        for (const auto& [k, v] : ints) dsm_options_set_int(opt.get(), k.c_str(), v);
        for (const auto& [k, v] : strings) dsm_options_set_string(opt.get(), k.c_str(), v.c_str());
        return opt;
    }
};

void add_problem_knobs(Knobs& k) {
    k.add_int("--n", "n", "problem dimension");
    k.add_double("--kappa", "kappa", "Holder exponent (gallery and schedule)");
    k.add_double("--cond", "cond", "spectrum spread of linear gallery problems");
    k.add_int("--rank", "rank", "rank of rank-deficient-linear");
    k.add_double("--y-scale", "y_scale", "magnitude of the built-in solution");
    k.add_double("--eps", "eps", "perturbation size of monotone-smooth");
    k.add_string("--norm", "norm", "vector norm: l2 or lp");
    k.add_double("--p-norm", "p_norm", "exponent of the lp norm");
    k.add_int("--seed", "seed", "run seed (manifest key: seed)");
}

void add_solve_knobs(Knobs& k) {
    k.add_double("--r0", "r0", "initial radius |a(0)|");
    k.add_double("--g0", "g0", "initial distance to the regularized solution");
    k.add_double("--c0", "c0", "Holder constant override");
    k.add_double("--c1", "c1", "resolvent constant override");
    k.add_double("--c2", "c2", "path bound constant override");
    k.add_double("--b", "b", "resolvent exponent override");
    k.add_double("--eps0", "eps0", "path radius bound");
    k.add_double("--theta", "theta", "ray angle");
    k.add_double("--r-target", "r_target", "integrate until r(t) reaches this radius");
    k.add_double("--t-max", "t_max", "integration horizon");
    k.add_double("--stop-residual", "stop_residual", "residual stop (<= 0 disables)");
    k.add_double("--rel-tol", "rel_tol", "integrator relative tolerance");
    k.add_double("--abs-tol", "abs_tol", "integrator absolute tolerance");
    k.add_double("--initial-step", "initial_step", "integrator initial step");
    k.add_int("--oracle-samples", "oracle_samples", "distance-oracle sample count");
    k.add_flag("--force", "force", "proceed even when schedule gates fail");
    k.add_flag("--estimate-constants", "estimate_constants",
               "estimate constants even when asserted");
}

int status_exit(dsm_status status) {
    std::fprintf(stderr, "error: %s\n", dsm_last_error());
    switch (status) {
        case DSM_ERR_GATE: return 2;
        case DSM_ERR_VERIFY: return 1;
        case DSM_ERR_USAGE:
        case DSM_ERR_IO: return 64;
        default: return 3;
    }
}

int emit(const Report& report, const std::string& format) {
    if (!report) return 0;
    if (format == "csv" && dsm_report_text(report.get())[0] != '\0')
        std::printf("%s", dsm_report_text(report.get()));
    else
        std::printf("%s\n", dsm_report_json(report.get()));
    return dsm_report_exit_code(report.get());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dsm - regularized Newton flow for operator equations"};
    app.require_subcommand(1);
    app.set_version_flag("--version", dsm_version());
    app.failure_message(CLI::FailureMessage::help);

    std::string out_dir;
    std::string format = "json";
    app.add_option("--out", out_dir, "output directory for traces and manifests");
    app.add_option("--format", format, "report format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));

    auto* solve = app.add_subcommand("solve", "derive a schedule and integrate the flow");
    std::string solve_problem;
    solve->add_option("problem", solve_problem, "gallery name or problem file")->required();
    Knobs solve_knobs;
    solve_knobs.cmd = solve;
    add_problem_knobs(solve_knobs);
    add_solve_knobs(solve_knobs);

    auto* sched = app.add_subcommand("schedule", "derive and validate a schedule only");
    std::string sched_problem;
    sched->add_option("problem", sched_problem, "gallery name or problem file")->required();
    Knobs sched_knobs;
    sched_knobs.cmd = sched;
    add_problem_knobs(sched_knobs);
    add_solve_knobs(sched_knobs);

    auto* verify = app.add_subcommand("verify", "run an invariant suite");
    std::string suite = "all";
    verify->add_option("suite", suite, "all, operator, schedule, lemma1, path, theorem");
    Knobs verify_knobs;
    verify_knobs.cmd = verify;
    verify_knobs.add_int("--seed", "seed", "suite seed");

    auto* bench = app.add_subcommand("bench", "compare the flow against baselines");
    std::string bench_problem;
    std::string baselines = "newton-plain,fixed-a,geometric-a";
    bench->add_option("problem", bench_problem, "gallery name or problem file")->required();
    bench->add_option("--baselines", baselines,
                      "comma-separated: newton-plain,fixed-a,geometric-a (empty for none)");
    Knobs bench_knobs;
    bench_knobs.cmd = bench;
    add_problem_knobs(bench_knobs);
    add_solve_knobs(bench_knobs);

    CLI11_PARSE(app, argc, argv);

    dsm_report* raw = nullptr;
    dsm_status st = DSM_OK;
    if (solve->parsed()) {
        Options opt = solve_knobs.build();
        st = dsm_run_solve(solve_problem.c_str(), opt.get(),
                           out_dir.empty() ? nullptr : out_dir.c_str(), &raw);
    } else if (sched->parsed()) {
        Options opt = sched_knobs.build();
        st = dsm_run_schedule(sched_problem.c_str(), opt.get(), &raw);
    } else if (verify->parsed()) {
        Options opt = verify_knobs.build();
        st = dsm_run_verify(suite.c_str(), opt.get(), &raw);
    } else if (bench->parsed()) {
        Options opt = bench_knobs.build();
        st = dsm_run_bench(bench_problem.c_str(), baselines.c_str(), opt.get(), &raw);
    } else {
        return 64;
    }
    Report report(raw);
    if (st != DSM_OK) return status_exit(st);
    return emit(report, format);
}
