#include "dsm/dsm.h"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <map>
#include <optional>
#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "bench.hpp"
#include "comparison.hpp"
#include "errors.hpp"
#include "gallery.hpp"
#include "manifest.hpp"
#include "operator_problem.hpp"
#include "path.hpp"
#include "problem_io.hpp"
#include "runner.hpp"
#include "schedule.hpp"
#include "solver.hpp"
#include "verify.hpp"

using nlohmann::json;

namespace {

thread_local std::string g_last_error;

dsm_status code_to_status(dsm::ErrorCode code) {
    switch (code) {
        case dsm::ErrorCode::Ok: return DSM_OK;
        case dsm::ErrorCode::VerifyFailed: return DSM_ERR_VERIFY;
        case dsm::ErrorCode::GateFailed: return DSM_ERR_GATE;
        case dsm::ErrorCode::SolverFailed: return DSM_ERR_SOLVER;
        case dsm::ErrorCode::ResolventSingular: return DSM_ERR_SINGULAR;
        case dsm::ErrorCode::NoConvergence: return DSM_ERR_NOCONV;
        case dsm::ErrorCode::Evaluation: return DSM_ERR_EVAL;
        case dsm::ErrorCode::Io: return DSM_ERR_IO;
        case dsm::ErrorCode::DegenerateSample: return DSM_ERR_DEGENERATE;
        case dsm::ErrorCode::NondifferentiablePoint: return DSM_ERR_NONDIFF;
        case dsm::ErrorCode::Usage: return DSM_ERR_USAGE;
    }
    return DSM_ERR_INTERNAL;
}

dsm_status fail(dsm_status status, const std::string& message) {
    g_last_error = message;
    return status;
}

dsm_status usage(const std::string& message) { return fail(DSM_ERR_USAGE, message); }

template <typename Fn>
dsm_status guarded(Fn&& fn) {
    try {
        g_last_error.clear();
        return fn();
    } catch (const dsm::Error& e) {
        return fail(code_to_status(e.code()), e.what());
    } catch (const std::exception& e) {
        return fail(DSM_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(DSM_ERR_INTERNAL, "unknown error");
    }
}

} // namespace

struct dsm_problem {
    dsm::OperatorProblem impl;
    json descriptor;
};

struct dsm_schedule {
    dsm::Schedule impl;
    dsm::ScheduleInputs inputs;
};

struct dsm_path {
    dsm::RegularizedPath impl;
};

struct dsm_trajectory {
    dsm::Trajectory impl;
    dsm::Schedule schedule;
};

struct dsm_lemma {
    dsm::InequalityInstance impl;
};

struct dsm_options {
    std::map<std::string, std::variant<double, std::int64_t, std::string, std::vector<double>>>
        values;

    std::optional<double> number(const std::string& key) const {
        auto it = values.find(key);
        if (it == values.end()) return std::nullopt;
        if (const auto* d = std::get_if<double>(&it->second)) return *d;
        if (const auto* i = std::get_if<std::int64_t>(&it->second))
            return static_cast<double>(*i);
        return std::nullopt;
    }
    std::optional<std::int64_t> integer(const std::string& key) const {
        auto it = values.find(key);
        if (it == values.end()) return std::nullopt;
        if (const auto* i = std::get_if<std::int64_t>(&it->second)) return *i;
        if (const auto* d = std::get_if<double>(&it->second))
            return static_cast<std::int64_t>(*d);
        return std::nullopt;
    }
    std::optional<std::string> text(const std::string& key) const {
        auto it = values.find(key);
        if (it == values.end()) return std::nullopt;
        if (const auto* s = std::get_if<std::string>(&it->second)) return *s;
        return std::nullopt;
    }
    std::optional<std::vector<double>> vector(const std::string& key) const {
        auto it = values.find(key);
        if (it == values.end()) return std::nullopt;
        if (const auto* v = std::get_if<std::vector<double>>(&it->second)) return *v;
        return std::nullopt;
    }
};

struct dsm_report {
    json doc;
    std::string rendered;
    std::string text;
    bool passed = true;
    int exit_code = 0;
};

namespace {

dsm::GalleryParams gallery_params(const dsm_options* opt) {
    dsm::GalleryParams p;
    if (!opt) return p;
    if (auto v = opt->integer("n")) p.n = static_cast<int>(*v);
    if (auto v = opt->number("kappa")) p.kappa = *v;
    if (auto v = opt->number("cond")) p.cond = *v;
    if (auto v = opt->integer("rank")) p.rank = static_cast<int>(*v);
    if (auto v = opt->number("y_scale")) p.y_scale = *v;
    if (auto v = opt->number("eps")) p.eps = *v;
    if (auto v = opt->integer("seed")) p.seed = static_cast<std::uint64_t>(*v);
    if (auto v = opt->number("theta")) p.theta = *v;
    if (auto v = opt->text("norm"); v && *v == "lp") {
        p.norm_kind = dsm::NormKind::Lp;
        if (auto q = opt->number("p_norm")) p.p_norm = *q;
    }
    return p;
}

dsm::SolveArgs solve_args(const dsm_options* opt) {
    dsm::SolveArgs args;
    if (!opt) return args;
    auto num = [&](const char* key, std::optional<double>& dst) {
        if (auto v = opt->number(key)) dst = *v;
    };
    num("r0", args.r0);
    num("g0", args.g0);
    num("c2", args.c2);
    num("kappa", args.kappa);
    num("c0", args.c0);
    num("c1", args.c1);
    num("b", args.b);
    num("eps0", args.eps0);
    num("theta", args.theta);
    num("r_target", args.r_target);
    num("t_max", args.t_max);
    num("stop_residual", args.stop_residual);
    num("rel_tol", args.rel_tol);
    num("abs_tol", args.abs_tol);
    num("initial_step", args.initial_step);
    if (auto v = opt->integer("oracle_samples")) args.oracle_samples = static_cast<int>(*v);
    if (auto v = opt->vector("u0")) args.u0 = *v;
    if (auto v = opt->integer("force")) args.force = *v != 0;
    if (auto v = opt->integer("estimate_constants")) args.estimate_constants = *v != 0;
    if (auto v = opt->integer("seed")) args.seed = static_cast<std::uint64_t>(*v);
    return args;
}

dsm_report* make_report(json doc, bool passed, int exit_code = 0, std::string text = {}) {
    auto* rep = new dsm_report;
    rep->doc = std::move(doc);
    rep->rendered = rep->doc.dump(2);
    rep->text = std::move(text);
    rep->passed = passed;
    rep->exit_code = exit_code;
    return rep;
}

} // namespace

extern "C" {

const char* dsm_version(void) {
    static const std::string v = dsm::tool_version();
    return v.c_str();
}

const char* dsm_last_error(void) { return g_last_error.c_str(); }

/* ---- options ---- */

dsm_options* dsm_options_create(void) { return new dsm_options; }
void dsm_options_free(dsm_options* options) { delete options; }

dsm_status dsm_options_set_double(dsm_options* options, const char* key, double value) {
    if (!options || !key) return usage("options/key must not be NULL");
    options->values[key] = value;
    return DSM_OK;
}

dsm_status dsm_options_set_int(dsm_options* options, const char* key, int64_t value) {
    if (!options || !key) return usage("options/key must not be NULL");
    options->values[key] = static_cast<std::int64_t>(value);
    return DSM_OK;
}

dsm_status dsm_options_set_string(dsm_options* options, const char* key, const char* value) {
    if (!options || !key || !value) return usage("options/key/value must not be NULL");
    options->values[key] = std::string(value);
    return DSM_OK;
}

dsm_status dsm_options_set_vector(dsm_options* options, const char* key, const double* values,
                                  int n) {
    if (!options || !key || (!values && n > 0)) return usage("options/key must not be NULL");
    if (n < 0) return usage("vector length must be nonnegative");
    options->values[key] = std::vector<double>(values, values + n);
    return DSM_OK;
}

/* ---- reports ---- */

const char* dsm_report_json(const dsm_report* report) {
    return report ? report->rendered.c_str() : "";
}

const char* dsm_report_text(const dsm_report* report) {
    return report ? report->text.c_str() : "";
}

int dsm_report_passed(const dsm_report* report) { return report && report->passed ? 1 : 0; }

int dsm_report_exit_code(const dsm_report* report) { return report ? report->exit_code : 64; }

void dsm_report_free(dsm_report* report) { delete report; }

/* ---- problems ---- */

dsm_status dsm_problem_create(int n, double norm_p, dsm_apply_fn apply,
                              dsm_derivative_fn derivative, void* user, const double* f,
                              dsm_problem** out) {
    if (!out) return usage("out must not be NULL");
    *out = nullptr;
    if (!apply || !f) return usage("apply and f must not be NULL");
    if (n <= 0) return usage("dimension must be positive");
    return guarded([&]() {
        dsm::VectorSpace space = norm_p > 0.0 && norm_p != 2.0
                                     ? dsm::VectorSpace(n, dsm::NormKind::Lp, norm_p)
                                     : dsm::VectorSpace(n);
        dsm::OperatorProblemConfig cfg{space};
        cfg.name = "callback";
        cfg.apply = [apply, user, n](const dsm::Vector& u) {
            dsm::Vector out_v(n);
            if (apply(user, u.data(), out_v.data(), n) != DSM_OK)
                throw dsm::EvaluationError("apply callback reported failure");
            return out_v;
        };
        if (derivative) {
            cfg.derivative = [derivative, user, n](const dsm::Vector& u, const dsm::Vector& h) {
                dsm::Vector out_v(n);
                if (derivative(user, u.data(), h.data(), out_v.data(), n) != DSM_OK)
                    throw dsm::EvaluationError("derivative callback reported failure");
                return out_v;
            };
        }
        cfg.rhs = Eigen::Map<const dsm::Vector>(f, n);
        cfg.resolvent.eps0 = 1e3;
        cfg.provenance = dsm::ConstantProvenance::Estimated;
        auto* handle = new dsm_problem{dsm::OperatorProblem(std::move(cfg)),
                                       json{{"kind", "callback"}, {"n", n}}};
        *out = handle;
        return DSM_OK;
    });
}

dsm_status dsm_problem_gallery(const char* name, const dsm_options* options, dsm_problem** out) {
    if (!out) return usage("out must not be NULL");
    *out = nullptr;
    if (!name) return usage("gallery name must not be NULL");
    return guarded([&]() {
        dsm::GalleryParams params = gallery_params(options);
        auto* handle = new dsm_problem{dsm::make_gallery(name, params),
                                       dsm::problem_descriptor(name, params)};
        *out = handle;
        return DSM_OK;
    });
}

dsm_status dsm_problem_from_file(const char* path, dsm_problem** out) {
    if (!out) return usage("out must not be NULL");
    *out = nullptr;
    if (!path) return usage("path must not be NULL");
    return guarded([&]() {
        json descriptor;
        dsm::OperatorProblem prob =
            dsm::resolve_problem(path, dsm::GalleryParams{}, &descriptor);
        *out = new dsm_problem{std::move(prob), std::move(descriptor)};
        return DSM_OK;
    });
}

dsm_status dsm_problem_set_constants(dsm_problem* problem, double c0, double kappa, double c1,
                                     double b, double eps0, double theta) {
    if (!problem) return usage("problem must not be NULL");
    return guarded([&]() {
        // Problems are immutable values; constant assertion rebuilds the
        // handle contents. The lambdas capture a copy, not the handle.
        dsm::OperatorProblemConfig cfg{problem->impl.space()};
        cfg.name = problem->impl.name();
        dsm::OperatorProblem copy = problem->impl;
        cfg.apply = [copy](const dsm::Vector& u) { return copy.eval_apply(u); };
        cfg.derivative = [copy](const dsm::Vector& u, const dsm::Vector& h) {
            return copy.apply_derivative(u, h);
        };
        cfg.jacobian = [copy](const dsm::Vector& u) { return copy.jacobian_matrix(u); };
        if (problem->impl.is_linear()) cfg.linear_matrix = problem->impl.linear_matrix();
        cfg.rhs = problem->impl.rhs();
        cfg.known_solution = problem->impl.known_solution();
        cfg.smoothness = {c0, kappa};
        cfg.resolvent = {c1, b, eps0, theta};
        cfg.provenance = dsm::ConstantProvenance::Asserted;
        problem->impl = dsm::OperatorProblem(std::move(cfg));
        problem->descriptor["asserted_constants"] =
            json{{"c0", c0}, {"kappa", kappa}, {"c1", c1},
                 {"b", b},   {"eps0", eps0},   {"theta", theta}};
        return DSM_OK;
    });
}

dsm_status dsm_problem_set_known_solution(dsm_problem* problem, const double* y) {
    if (!problem || !y) return usage("problem/y must not be NULL");
    return guarded([&]() {
        const int n = problem->impl.dimension();
        dsm::Vector yv = Eigen::Map<const dsm::Vector>(y, n);
        dsm::OperatorProblem copy = problem->impl;
        dsm::OperatorProblemConfig cfg{copy.space()};
        cfg.name = copy.name();
        cfg.apply = [copy](const dsm::Vector& u) { return copy.eval_apply(u); };
        cfg.derivative = [copy](const dsm::Vector& u, const dsm::Vector& h) {
            return copy.apply_derivative(u, h);
        };
        cfg.jacobian = [copy](const dsm::Vector& u) { return copy.jacobian_matrix(u); };
        if (copy.is_linear()) cfg.linear_matrix = copy.linear_matrix();
        cfg.rhs = copy.rhs();
        cfg.smoothness = copy.smoothness();
        cfg.resolvent = copy.resolvent();
        cfg.provenance = copy.provenance();
        cfg.known_solution = std::move(yv);
        problem->impl = dsm::OperatorProblem(std::move(cfg));
        return DSM_OK;
    });
}

int dsm_problem_dimension(const dsm_problem* problem) {
    return problem ? problem->impl.dimension() : 0;
}

dsm_status dsm_problem_rhs(const dsm_problem* problem, double* f_out) {
    if (!problem || !f_out) return usage("problem/f_out must not be NULL");
    const dsm::Vector& f = problem->impl.rhs();
    std::memcpy(f_out, f.data(), sizeof(double) * f.size());
    return DSM_OK;
}

dsm_status dsm_problem_known_solution(const dsm_problem* problem, double* y_out,
                                      int* has_solution) {
    if (!problem || !has_solution) return usage("problem/has_solution must not be NULL");
    const auto& y = problem->impl.known_solution();
    *has_solution = y ? 1 : 0;
    if (y && y_out) std::memcpy(y_out, y->data(), sizeof(double) * y->size());
    return DSM_OK;
}

dsm_status dsm_problem_eval(const dsm_problem* problem, const double* u, double* out) {
    if (!problem || !u || !out) return usage("problem/u/out must not be NULL");
    return guarded([&]() {
        const int n = problem->impl.dimension();
        dsm::Vector result = problem->impl.eval_apply(Eigen::Map<const dsm::Vector>(u, n));
        std::memcpy(out, result.data(), sizeof(double) * n);
        return DSM_OK;
    });
}

dsm_status dsm_problem_apply_derivative(const dsm_problem* problem, const double* u,
                                        const double* h, double* out) {
    if (!problem || !u || !h || !out) return usage("problem/u/h/out must not be NULL");
    return guarded([&]() {
        const int n = problem->impl.dimension();
        dsm::Vector result = problem->impl.apply_derivative(
            Eigen::Map<const dsm::Vector>(u, n), Eigen::Map<const dsm::Vector>(h, n));
        std::memcpy(out, result.data(), sizeof(double) * n);
        return DSM_OK;
    });
}

dsm_status dsm_problem_apply_resolvent(const dsm_problem* problem, const double* u, double a_re,
                                       double a_im, const double* v_re, const double* v_im,
                                       double* out_re, double* out_im) {
    if (!problem || !u || !v_re || !out_re) return usage("problem/u/v/out must not be NULL");
    return guarded([&]() {
        const int n = problem->impl.dimension();
        Eigen::Map<const dsm::Vector> um(u, n);
        if (a_im == 0.0 && !v_im) {
            dsm::Vector h =
                problem->impl.apply_resolvent(um, a_re, Eigen::Map<const dsm::Vector>(v_re, n));
            std::memcpy(out_re, h.data(), sizeof(double) * n);
            if (out_im) std::memset(out_im, 0, sizeof(double) * n);
            return DSM_OK;
        }
        dsm::ComplexVector v(n);
        for (int i = 0; i < n; ++i) v[i] = dsm::Complex(v_re[i], v_im ? v_im[i] : 0.0);
        dsm::ComplexVector h =
            problem->impl.apply_resolvent(um, dsm::Complex(a_re, a_im), v);
        for (int i = 0; i < n; ++i) {
            out_re[i] = h[i].real();
            if (out_im) out_im[i] = h[i].imag();
        }
        return DSM_OK;
    });
}

dsm_status dsm_problem_norm(const dsm_problem* problem, const double* v, double* out) {
    if (!problem || !v || !out) return usage("problem/v/out must not be NULL");
    return guarded([&]() {
        const int n = problem->impl.dimension();
        *out = problem->impl.norm(dsm::Vector(Eigen::Map<const dsm::Vector>(v, n)));
        return DSM_OK;
    });
}

dsm_status dsm_problem_norm_rate(const dsm_problem* problem, const double* w, const double* wdot,
                                 double* norm_out, double* rate_out) {
    if (!problem || !w || !wdot || !norm_out || !rate_out)
        return usage("problem/w/wdot/outputs must not be NULL");
    return guarded([&]() {
        const int n = problem->impl.dimension();
        Eigen::Map<const dsm::Vector> wm(w, n), dm(wdot, n);
        *norm_out = problem->impl.norm(dsm::Vector(wm));
        *rate_out = problem->impl.space().norm_rate(wm, dm);
        return DSM_OK;
    });
}

dsm_status dsm_problem_estimate_holder(const dsm_problem* problem, int samples, double radius,
                                       const double* center, uint64_t seed, double* c0_out,
                                       double* kappa_out) {
    if (!problem || !c0_out || !kappa_out) return usage("problem/outputs must not be NULL");
    return guarded([&]() {
        const int n = problem->impl.dimension();
        dsm::Vector c = center ? dsm::Vector(Eigen::Map<const dsm::Vector>(center, n))
                               : dsm::Vector(dsm::Vector::Zero(n));
        dsm::HolderEstimate est =
            dsm::estimate_holder_constants(problem->impl, samples, radius, c, seed);
        *c0_out = est.c0;
        *kappa_out = est.kappa;
        return DSM_OK;
    });
}

dsm_status dsm_problem_verify_resolvent_bound(const dsm_problem* problem, const double* u,
                                              const double* r_grid, int n_grid,
                                              dsm_report** report_out) {
    if (!problem || !u || !r_grid || !report_out)
        return usage("problem/u/r_grid/report_out must not be NULL");
    *report_out = nullptr;
    return guarded([&]() {
        const int n = problem->impl.dimension();
        std::vector<double> grid(r_grid, r_grid + n_grid);
        dsm::ResolventBoundReport rep = dsm::verify_resolvent_bound(
            problem->impl, dsm::Vector(Eigen::Map<const dsm::Vector>(u, n)), grid);
        json rows = json::array();
        for (const auto& row : rep.rows)
            rows.push_back(json{{"r", row.r}, {"inverse_norm", row.inverse_norm},
                                {"product", row.product}, {"singular", row.singular}});
        *report_out = make_report(json{{"rows", rows}, {"max_product", rep.max_product},
                                       {"c1", rep.c1}, {"b", rep.b},
                                       {"singular_count", rep.singular_count},
                                       {"pass", rep.pass}},
                                  rep.pass);
        return DSM_OK;
    });
}

void dsm_problem_free(dsm_problem* problem) { delete problem; }

/* ---- schedules ---- */

dsm_status dsm_schedule_derive(const dsm_options* inputs, dsm_schedule** out) {
    if (!out) return usage("out must not be NULL");
    *out = nullptr;
    if (!inputs) return usage("inputs must not be NULL");
    return guarded([&]() {
        dsm::ScheduleInputs in;
        if (auto v = inputs->number("b")) in.b = *v;
        if (auto v = inputs->number("kappa")) in.kappa = *v;
        if (auto v = inputs->number("c0")) in.c0 = *v;
        if (auto v = inputs->number("c1")) in.c1 = *v;
        if (auto v = inputs->number("c2")) in.c2 = *v;
        if (auto v = inputs->number("g0")) in.g0 = *v;
        if (auto v = inputs->number("r0")) in.r0 = *v;
        if (auto v = inputs->number("theta")) in.theta = *v;
        if (auto v = inputs->number("eps0"))
            in.eps0 = *v;
        else
            in.eps0 = std::max(1.0, 10.0 * in.r0);
        *out = new dsm_schedule{dsm::derive_schedule(in), in};
        return DSM_OK;
    });
}

dsm_status dsm_schedule_constant(const dsm_schedule* schedule, const char* name, double* out) {
    if (!schedule || !name || !out) return usage("schedule/name/out must not be NULL");
    const dsm::Schedule& s = schedule->impl;
    const std::string key(name);
    if (key == "p") *out = s.p();
    else if (key == "k") *out = s.k();
    else if (key == "lambda") *out = s.lambda();
    else if (key == "c2") *out = s.c2();
    else if (key == "c3") *out = s.c3();
    else if (key == "c4") *out = s.c4();
    else if (key == "c5") *out = s.c5();
    else if (key == "c6") *out = s.c6();
    else if (key == "b") *out = s.b();
    else if (key == "kappa") *out = s.kappa();
    else if (key == "g0") *out = s.g0();
    else if (key == "r0") *out = s.r0();
    else if (key == "theta") *out = s.theta();
    else if (key == "eps0") *out = s.eps0();
    else if (key == "decay_balance") *out = dsm::Schedule::decay_balance;
    else return usage("unknown schedule constant '" + key + "'");
    return DSM_OK;
}

dsm_status dsm_schedule_eval(const dsm_schedule* schedule, double t, double* r_out,
                             double* rdot_out, double* a_re_out, double* a_im_out,
                             double* envelope_out) {
    if (!schedule) return usage("schedule must not be NULL");
    if (!(t >= 0.0)) return usage("t must be nonnegative");
    const dsm::Schedule& s = schedule->impl;
    if (r_out) *r_out = s.r(t);
    if (rdot_out) *rdot_out = s.rdot(t);
    const std::complex<double> a = s.a(t);
    if (a_re_out) *a_re_out = a.real();
    if (a_im_out) *a_im_out = a.imag();
    if (envelope_out) *envelope_out = s.envelope(t);
    return DSM_OK;
}

dsm_status dsm_schedule_time_for_radius(const dsm_schedule* schedule, double r_target,
                                        double* t_out) {
    if (!schedule || !t_out) return usage("schedule/t_out must not be NULL");
    return guarded([&]() {
        *t_out = schedule->impl.time_for_radius(r_target);
        return DSM_OK;
    });
}

dsm_status dsm_schedule_validate(const dsm_schedule* schedule, dsm_report** report_out) {
    if (!schedule || !report_out) return usage("schedule/report_out must not be NULL");
    *report_out = nullptr;
    return guarded([&]() {
        dsm::GateReport gates =
            dsm::validate_initial_conditions(schedule->impl, schedule->inputs);
        *report_out = make_report(dsm::gates_json(gates), gates.all_pass,
                                  gates.all_pass ? 0 : 2);
        return DSM_OK;
    });
}

void dsm_schedule_free(dsm_schedule* schedule) { delete schedule; }

/* ---- comparison lemma ---- */

dsm_status dsm_lemma_create(dsm_scalar_fn gamma, dsm_scalar2_fn alpha, dsm_scalar_fn beta,
                            dsm_scalar_fn mu, dsm_scalar_fn mu_dot, void* user, double g0,
                            double horizon, const double* grid, int n_grid, dsm_lemma** out) {
    if (!out) return usage("out must not be NULL");
    *out = nullptr;
    if (!gamma || !alpha || !beta || !mu) return usage("gamma/alpha/beta/mu must not be NULL");
    if (!grid || n_grid < 2) return usage("grid with at least two points required");
    return guarded([&]() {
        dsm::InequalityInstance inst;
        inst.gamma = [gamma, user](double t) { return gamma(user, t); };
        inst.alpha = [alpha, user](double t, double g) { return alpha(user, t, g); };
        inst.beta = [beta, user](double t) { return beta(user, t); };
        inst.mu = [mu, user](double t) { return mu(user, t); };
        if (mu_dot) inst.mu_dot = [mu_dot, user](double t) { return mu_dot(user, t); };
        inst.g0 = g0;
        inst.horizon = horizon;
        inst.grid.assign(grid, grid + n_grid);
        inst.validate();
        *out = new dsm_lemma{std::move(inst)};
        return DSM_OK;
    });
}

dsm_status dsm_lemma_check_conditions(const dsm_lemma* lemma, double* margin_out,
                                      int* condition10_ok_out) {
    if (!lemma || !margin_out || !condition10_ok_out)
        return usage("lemma/outputs must not be NULL");
    return guarded([&]() {
        dsm::ConditionReport rep = dsm::check_conditions(lemma->impl);
        *margin_out = rep.condition9_margin;
        *condition10_ok_out = rep.condition10_ok ? 1 : 0;
        return DSM_OK;
    });
}

dsm_status dsm_lemma_integrate_phi(const dsm_lemma* lemma, double* phi_out, int* blew_up_out,
                                   double* blowup_time_out) {
    if (!lemma || !phi_out) return usage("lemma/phi_out must not be NULL");
    return guarded([&]() {
        dsm::PhiTrajectory phi = dsm::integrate_phi(lemma->impl);
        if (blew_up_out) *blew_up_out = phi.blew_up ? 1 : 0;
        if (blowup_time_out) *blowup_time_out = phi.blowup_time;
        for (std::size_t i = 0; i < lemma->impl.grid.size(); ++i)
            phi_out[i] = i < phi.phi.size() ? phi.phi[i] : std::nan("");
        return DSM_OK;
    });
}

dsm_status dsm_lemma_verify_sandwich(const dsm_lemma* lemma, const double* g_samples,
                                     dsm_report** report_out) {
    if (!lemma || !g_samples || !report_out)
        return usage("lemma/g_samples/report_out must not be NULL");
    *report_out = nullptr;
    return guarded([&]() {
        std::vector<double> g(g_samples, g_samples + lemma->impl.grid.size());
        dsm::Certificate cert = dsm::verify_sandwich(g, lemma->impl);
        *report_out = make_report(dsm::certificate_json(cert), cert.passed());
        return DSM_OK;
    });
}

void dsm_lemma_free(dsm_lemma* lemma) { delete lemma; }

/* ---- regularized path ---- */

dsm_status dsm_solve_regularized(const dsm_problem* problem, double a_re, double a_im,
                                 const double* guess, double* w_out, double* residual_out,
                                 int* iters_out) {
    if (!problem || !guess || !w_out) return usage("problem/guess/w_out must not be NULL");
    return guarded([&]() {
        const int n = problem->impl.dimension();
        Eigen::Map<const dsm::Vector> g(guess, n);
        if (a_im == 0.0) {
            dsm::RegularizedSolve sol = dsm::solve_regularized(problem->impl, a_re, g);
            std::memcpy(w_out, sol.w.data(), sizeof(double) * n);
            if (residual_out) *residual_out = sol.residual;
            if (iters_out) *iters_out = sol.iters;
            return DSM_OK;
        }
        dsm::RegularizedSolveComplex sol = dsm::solve_regularized(
            problem->impl, dsm::Complex(a_re, a_im), dsm::ComplexVector(g.cast<dsm::Complex>()));
        for (int i = 0; i < n; ++i) w_out[i] = sol.w[i].real();
        if (residual_out) *residual_out = sol.residual;
        if (iters_out) *iters_out = sol.iters;
        return DSM_OK;
    });
}

dsm_status dsm_path_track(const dsm_problem* problem, const double* a_moduli, int n_values,
                          const double* w_start, dsm_path** out) {
    if (!out) return usage("out must not be NULL");
    *out = nullptr;
    if (!problem || !w_start) return usage("problem/w_start must not be NULL");
    if (n_values < 0 || (n_values > 0 && !a_moduli)) return usage("invalid moduli array");
    return guarded([&]() {
        const int n = problem->impl.dimension();
        std::span<const double> moduli(a_moduli, static_cast<std::size_t>(n_values));
        dsm::RegularizedPath path = dsm::track_path(
            problem->impl, moduli, dsm::Vector(Eigen::Map<const dsm::Vector>(w_start, n)));
        *out = new dsm_path{std::move(path)};
        return DSM_OK;
    });
}

int dsm_path_size(const dsm_path* path) {
    return path ? static_cast<int>(path->impl.entries.size()) : 0;
}

dsm_status dsm_path_entry(const dsm_path* path, int index, double* a_abs_out, double* w_out,
                          double* residual_out, int* newton_iters_out) {
    if (!path) return usage("path must not be NULL");
    if (index < 0 || index >= static_cast<int>(path->impl.entries.size()))
        return usage("path index out of range");
    const dsm::PathEntry& e = path->impl.entries[index];
    if (a_abs_out) *a_abs_out = std::abs(e.a);
    if (w_out) {
        if (e.w.size() > 0) {
            std::memcpy(w_out, e.w.data(), sizeof(double) * e.w.size());
        } else {
            for (int i = 0; i < e.w_complex.size(); ++i) w_out[i] = e.w_complex[i].real();
        }
    }
    if (residual_out) *residual_out = e.residual;
    if (newton_iters_out) *newton_iters_out = e.newton_iters;
    return DSM_OK;
}

dsm_status dsm_path_limit(const dsm_path* path, double* w_out) {
    if (!path || !w_out) return usage("path/w_out must not be NULL");
    if (path->impl.limit_estimate) {
        const dsm::Vector& w = *path->impl.limit_estimate;
        std::memcpy(w_out, w.data(), sizeof(double) * w.size());
        return DSM_OK;
    }
    if (path->impl.limit_estimate_complex) {
        const dsm::ComplexVector& w = *path->impl.limit_estimate_complex;
        for (int i = 0; i < w.size(); ++i) w_out[i] = w[i].real();
        return DSM_OK;
    }
    return usage("path is empty");
}

dsm_status dsm_path_write_csv(const dsm_path* path, const dsm_problem* problem,
                              const char* file) {
    if (!path || !problem || !file) return usage("path/problem/file must not be NULL");
    return guarded([&]() {
        dsm::write_file_atomic(file, dsm::path_csv(path->impl, problem->impl));
        return DSM_OK;
    });
}

void dsm_path_free(dsm_path* path) { delete path; }

dsm_status dsm_normal_solution(const double* a_row_major, int rows, int cols, const double* f,
                               const double* a_shifts, int n_shifts, double* y_out,
                               double* history_out) {
    if (!a_row_major || !f || !a_shifts || !y_out)
        return usage("matrix/f/shifts/y_out must not be NULL");
    if (rows <= 0 || cols <= 0 || n_shifts <= 0) return usage("invalid sizes");
    return guarded([&]() {
        dsm::Matrix a(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) a(i, j) = a_row_major[i * cols + j];
        dsm::NormalSolutionResult res = dsm::normal_solution(
            a, dsm::Vector(Eigen::Map<const dsm::Vector>(f, rows)),
            std::span<const double>(a_shifts, static_cast<std::size_t>(n_shifts)));
        std::memcpy(y_out, res.y.data(), sizeof(double) * cols);
        if (history_out)
            for (std::size_t i = 0; i + 1 < static_cast<std::size_t>(n_shifts); ++i)
                history_out[i] = i < res.step_norms.size() ? res.step_norms[i] : std::nan("");
        return DSM_OK;
    });
}

/* ---- flow integration ---- */

dsm_status dsm_solve(const dsm_problem* problem, const dsm_schedule* schedule, const double* u0,
                     const dsm_options* options, dsm_trajectory** out) {
    if (!out) return usage("out must not be NULL");
    *out = nullptr;
    if (!problem || !schedule || !u0) return usage("problem/schedule/u0 must not be NULL");
    return guarded([&]() {
        dsm::IntegratorConfig cfg;
        cfg.t_max = 100.0;
        if (options) {
            if (auto v = options->number("rel_tol")) cfg.rel_tol = *v;
            if (auto v = options->number("abs_tol")) cfg.abs_tol = *v;
            if (auto v = options->number("initial_step")) cfg.initial_step = *v;
            if (auto v = options->number("t_max")) cfg.t_max = *v;
            if (auto v = options->number("stop_residual")) cfg.stop_residual = *v;
            if (auto v = options->integer("oracle_samples"))
                cfg.oracle_samples = static_cast<int>(*v);
            if (auto v = options->integer("max_steps")) cfg.max_steps = *v;
        }
        const int n = problem->impl.dimension();
        dsm::Trajectory traj =
            dsm::dsm_solve(problem->impl, schedule->impl,
                           dsm::Vector(Eigen::Map<const dsm::Vector>(u0, n)), cfg, true);
        *out = new dsm_trajectory{std::move(traj), schedule->impl};
        return DSM_OK;
    });
}

int dsm_trajectory_size(const dsm_trajectory* trajectory) {
    return trajectory ? static_cast<int>(trajectory->impl.points.size()) : 0;
}

const char* dsm_trajectory_status(const dsm_trajectory* trajectory) {
    return trajectory ? dsm::to_string(trajectory->impl.status) : "Invalid";
}

dsm_status dsm_trajectory_point(const dsm_trajectory* trajectory, int index, double* t, double* r,
                                double* residual, double* envelope, double* dist_to_w,
                                double* dist_to_y) {
    if (!trajectory) return usage("trajectory must not be NULL");
    if (index < 0 || index >= static_cast<int>(trajectory->impl.points.size()))
        return usage("point index out of range");
    const dsm::TrajectoryPoint& pt = trajectory->impl.points[index];
    if (t) *t = pt.t;
    if (r) *r = pt.r;
    if (residual) *residual = pt.residual;
    if (envelope) *envelope = pt.envelope;
    if (dist_to_w) *dist_to_w = pt.dist_to_w.value_or(std::nan(""));
    if (dist_to_y) *dist_to_y = pt.dist_to_y.value_or(std::nan(""));
    return DSM_OK;
}

dsm_status dsm_trajectory_final(const dsm_trajectory* trajectory, double* t_out, double* u_out) {
    if (!trajectory) return usage("trajectory must not be NULL");
    if (t_out) *t_out = trajectory->impl.t_final;
    if (u_out)
        std::memcpy(u_out, trajectory->impl.u_final.data(),
                    sizeof(double) * trajectory->impl.u_final.size());
    return DSM_OK;
}

dsm_status dsm_trajectory_write_csv(const dsm_trajectory* trajectory, const char* file) {
    if (!trajectory || !file) return usage("trajectory/file must not be NULL");
    return guarded([&]() {
        dsm::write_file_atomic(file, dsm::trajectory_csv(trajectory->impl));
        return DSM_OK;
    });
}

dsm_status dsm_trajectory_envelope_check(const dsm_trajectory* trajectory, double tol_env,
                                         dsm_report** report_out) {
    if (!trajectory || !report_out) return usage("trajectory/report_out must not be NULL");
    *report_out = nullptr;
    return guarded([&]() {
        dsm::EnvelopeReport rep =
            dsm::envelope_check(trajectory->impl, tol_env > 0.0 ? tol_env : 0.05);
        *report_out = make_report(dsm::envelope_json(rep), rep.pass);
        return DSM_OK;
    });
}

void dsm_trajectory_free(dsm_trajectory* trajectory) { delete trajectory; }

/* ---- high-level runs ---- */

dsm_status dsm_run_solve(const char* problem_spec, const dsm_options* options,
                         const char* out_dir, dsm_report** report_out) {
    if (!report_out) return usage("report_out must not be NULL");
    *report_out = nullptr;
    if (!problem_spec) return usage("problem_spec must not be NULL");
    return guarded([&]() {
        json descriptor;
        dsm::OperatorProblem prob =
            dsm::resolve_problem(problem_spec, gallery_params(options), &descriptor);
        dsm::SolveArgs args = solve_args(options);
        dsm::SolveOutcome outcome =
            dsm::run_solve(prob, descriptor, args, out_dir ? out_dir : "");
        std::string text = "status=" + outcome.manifest.value("status", std::string("?")) +
                           " exit_code=" + std::to_string(outcome.exit_code);
        if (outcome.manifest.contains("metrics")) {
            const json& m = outcome.manifest["metrics"];
            if (m.contains("final_residual"))
                text += " final_residual=" + m["final_residual"].dump();
            if (m.contains("final_dist_to_y"))
                text += " final_dist_to_y=" + m["final_dist_to_y"].dump();
        }
        text += "\n";
        *report_out = make_report(outcome.manifest, outcome.exit_code == 0, outcome.exit_code,
                                  std::move(text));
        return DSM_OK;
    });
}

dsm_status dsm_run_schedule(const char* problem_spec, const dsm_options* options,
                            dsm_report** report_out) {
    if (!report_out) return usage("report_out must not be NULL");
    *report_out = nullptr;
    if (!problem_spec) return usage("problem_spec must not be NULL");
    return guarded([&]() {
        json descriptor;
        dsm::OperatorProblem prob =
            dsm::resolve_problem(problem_spec, gallery_params(options), &descriptor);
        dsm::SolveArgs args = solve_args(options);
        json doc = dsm::run_schedule(prob, descriptor, args);
        const bool pass = doc["gates"]["all_pass"].get<bool>();
        *report_out = make_report(std::move(doc), pass, pass ? 0 : 2);
        return DSM_OK;
    });
}

dsm_status dsm_run_verify(const char* suite, const dsm_options* options,
                          dsm_report** report_out) {
    if (!report_out) return usage("report_out must not be NULL");
    *report_out = nullptr;
    if (!suite) return usage("suite must not be NULL");
    return guarded([&]() {
        std::uint64_t seed = 1;
        if (options)
            if (auto v = options->integer("seed")) seed = static_cast<std::uint64_t>(*v);
        dsm::VerifyReport rep = dsm::run_verify(suite, seed);
        std::string text = "name,pass,margin\n";
        for (const dsm::VerifyCheck& c : rep.checks) {
            char line[160];
            std::snprintf(line, sizeof(line), "%s,%s,%.6g\n", c.name.c_str(),
                          c.pass ? "pass" : "FAIL", c.margin);
            text += line;
        }
        *report_out =
            make_report(rep.to_json(), rep.all_pass, rep.all_pass ? 0 : 1, std::move(text));
        return DSM_OK;
    });
}

dsm_status dsm_run_bench(const char* problem_spec, const char* baselines,
                         const dsm_options* options, dsm_report** report_out) {
    if (!report_out) return usage("report_out must not be NULL");
    *report_out = nullptr;
    if (!problem_spec) return usage("problem_spec must not be NULL");
    return guarded([&]() {
        json descriptor;
        dsm::OperatorProblem prob =
            dsm::resolve_problem(problem_spec, gallery_params(options), &descriptor);
        std::vector<std::string> names;
        if (baselines && *baselines) {
            std::string s(baselines);
            std::size_t pos = 0;
            while (pos != std::string::npos) {
                std::size_t comma = s.find(',', pos);
                names.push_back(s.substr(pos, comma == std::string::npos ? comma : comma - pos));
                pos = comma == std::string::npos ? comma : comma + 1;
            }
        }
        dsm::BenchReport rep = dsm::run_bench(prob, names, solve_args(options));
        json doc = rep.to_json();
        doc["problem"] = descriptor;
        doc["table"] = rep.table;
        *report_out = make_report(std::move(doc), true, 0, rep.table);
        return DSM_OK;
    });
}

} /* extern "C" */
