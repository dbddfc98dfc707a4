/*
 * dsm - dynamical-systems solver for operator equations F(u) = f whose
 * linearizations may be singular in the limit.
 *
 * C interface of the shared library. All state lives behind opaque handles;
 * every function returns a dsm_status, and dsm_last_error() describes the
 * most recent failure on the calling thread. Handles are created by
 * dsm_*_create/..._from_* functions and released with the matching
 * dsm_*_free; freeing NULL is a no-op.
 *
 * Vectors cross the boundary as dense double arrays of the problem
 * dimension. Complex scalars are (re, im) pairs; complex vectors are
 * separate real and imaginary arrays, with a NULL imaginary part meaning
 * identically zero.
 */

#ifndef DSM_H
#define DSM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define DSM_API __declspec(dllexport)
#else
#define DSM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dsm_status {
    DSM_OK = 0,
    DSM_ERR_VERIFY = 1,      /* a verification suite reported failures */
    DSM_ERR_GATE = 2,        /* schedule gates failed */
    DSM_ERR_SOLVER = 3,      /* integration or solve failed */
    DSM_ERR_SINGULAR = 10,   /* shifted operator singular to machine precision */
    DSM_ERR_NOCONV = 11,     /* Newton iteration did not converge */
    DSM_ERR_EVAL = 12,       /* operator produced non-finite values */
    DSM_ERR_IO = 13,         /* file read/write failure */
    DSM_ERR_DEGENERATE = 14, /* estimation sample was degenerate */
    DSM_ERR_NONDIFF = 15,    /* norm queried at a nondifferentiable point */
    DSM_ERR_USAGE = 64,      /* invalid arguments or preconditions */
    DSM_ERR_INTERNAL = 70
} dsm_status;

typedef struct dsm_problem dsm_problem;
typedef struct dsm_schedule dsm_schedule;
typedef struct dsm_path dsm_path;
typedef struct dsm_trajectory dsm_trajectory;
typedef struct dsm_lemma dsm_lemma;
typedef struct dsm_options dsm_options;
typedef struct dsm_report dsm_report;

DSM_API const char* dsm_version(void);

/* Message for the most recent error on this thread; empty string if none. */
DSM_API const char* dsm_last_error(void);

/* ---- options ----------------------------------------------------------- */
/* String-keyed option bag. Keys mirror the manifest keys one to one
 * (r0, g0, c0, c1, c2, b, kappa, eps0, theta, r_target, t_max,
 * stop_residual, rel_tol, abs_tol, initial_step, oracle_samples, seed,
 * force, estimate_constants, n, cond, rank, y_scale, eps, norm, p_norm). */

DSM_API dsm_options* dsm_options_create(void);
DSM_API void dsm_options_free(dsm_options* options);
DSM_API dsm_status dsm_options_set_double(dsm_options* options, const char* key, double value);
DSM_API dsm_status dsm_options_set_int(dsm_options* options, const char* key, int64_t value);
DSM_API dsm_status dsm_options_set_string(dsm_options* options, const char* key,
                                          const char* value);
DSM_API dsm_status dsm_options_set_vector(dsm_options* options, const char* key,
                                          const double* values, int n);

/* ---- reports ------------------------------------------------------------ */

DSM_API const char* dsm_report_json(const dsm_report* report);
/* Compact text rendering (CSV rows for suites, a table for benchmarks). */
DSM_API const char* dsm_report_text(const dsm_report* report);
DSM_API int dsm_report_passed(const dsm_report* report);
/* CLI exit code the report maps to: 0 ok, 1 verification failure, 2 gate
 * failure, 3 solver failure. */
DSM_API int dsm_report_exit_code(const dsm_report* report);
DSM_API void dsm_report_free(dsm_report* report);

/* ---- problems ------------------------------------------------------------ */

typedef dsm_status (*dsm_apply_fn)(void* user, const double* u, double* out, int n);
typedef dsm_status (*dsm_derivative_fn)(void* user, const double* u, const double* h, double* out,
                                        int n);

/* Custom problem from callbacks; derivative may be NULL (forward
 * differences are used). norm_p <= 0 selects the l2 norm. */
DSM_API dsm_status dsm_problem_create(int n, double norm_p, dsm_apply_fn apply,
                                      dsm_derivative_fn derivative, void* user, const double* f,
                                      dsm_problem** out);

/* Built-in gallery: wellposed-linear, illposed-kernel, rank-deficient-linear,
 * monotone-holder, monotone-smooth. Options: n, kappa, cond, rank, y_scale,
 * eps, seed, theta, norm ("l2"/"lp"), p_norm. */
DSM_API dsm_status dsm_problem_gallery(const char* name, const dsm_options* options,
                                       dsm_problem** out);

DSM_API dsm_status dsm_problem_from_file(const char* path, dsm_problem** out);

/* Asserted constants: c0, kappa (smoothness); c1, b, eps0, theta (resolvent). */
DSM_API dsm_status dsm_problem_set_constants(dsm_problem* problem, double c0, double kappa,
                                             double c1, double b, double eps0, double theta);
DSM_API dsm_status dsm_problem_set_known_solution(dsm_problem* problem, const double* y);

DSM_API int dsm_problem_dimension(const dsm_problem* problem);
DSM_API dsm_status dsm_problem_rhs(const dsm_problem* problem, double* f_out);
DSM_API dsm_status dsm_problem_known_solution(const dsm_problem* problem, double* y_out,
                                              int* has_solution);

DSM_API dsm_status dsm_problem_eval(const dsm_problem* problem, const double* u, double* out);
DSM_API dsm_status dsm_problem_apply_derivative(const dsm_problem* problem, const double* u,
                                                const double* h, double* out);

/* Solves (A(u) + aI) h = v for a = a_re + i a_im. v_im/out_im may be NULL
 * when the imaginary parts are zero/not wanted. */
DSM_API dsm_status dsm_problem_apply_resolvent(const dsm_problem* problem, const double* u,
                                               double a_re, double a_im, const double* v_re,
                                               const double* v_im, double* out_re,
                                               double* out_im);

DSM_API dsm_status dsm_problem_norm(const dsm_problem* problem, const double* v, double* out);
/* Norm and its Gateaux rate along wdot; fails with DSM_ERR_NONDIFF at w = 0. */
DSM_API dsm_status dsm_problem_norm_rate(const dsm_problem* problem, const double* w,
                                         const double* wdot, double* norm_out, double* rate_out);

/* Least-squares fit of the derivative's Holder constants on random pairs. */
DSM_API dsm_status dsm_problem_estimate_holder(const dsm_problem* problem, int samples,
                                               double radius, const double* center,
                                               uint64_t seed, double* c0_out, double* kappa_out);

/* Exact (SVD-based) check of the resolvent bound over an r grid. */
DSM_API dsm_status dsm_problem_verify_resolvent_bound(const dsm_problem* problem,
                                                      const double* u, const double* r_grid,
                                                      int n_grid, dsm_report** report_out);

DSM_API void dsm_problem_free(dsm_problem* problem);

/* ---- schedules ------------------------------------------------------------ */

/* Options: b, kappa, c0, c1, c2, g0, r0, theta, eps0. */
DSM_API dsm_status dsm_schedule_derive(const dsm_options* inputs, dsm_schedule** out);

/* Derived constant by name: p, k, lambda, c2..c6, b, kappa, g0, r0, theta,
 * eps0, decay_balance. */
DSM_API dsm_status dsm_schedule_constant(const dsm_schedule* schedule, const char* name,
                                         double* out);

DSM_API dsm_status dsm_schedule_eval(const dsm_schedule* schedule, double t, double* r_out,
                                     double* rdot_out, double* a_re_out, double* a_im_out,
                                     double* envelope_out);

DSM_API dsm_status dsm_schedule_time_for_radius(const dsm_schedule* schedule, double r_target,
                                                double* t_out);

/* Gate validation report (see the library documentation for the gates). */
DSM_API dsm_status dsm_schedule_validate(const dsm_schedule* schedule, dsm_report** report_out);

DSM_API void dsm_schedule_free(dsm_schedule* schedule);

/* ---- comparison lemma ----------------------------------------------------- */

typedef double (*dsm_scalar_fn)(void* user, double t);
typedef double (*dsm_scalar2_fn)(void* user, double t, double g);

/* gamma, alpha(t,g), beta, mu over a uniform-or-custom grid covering
 * [0, horizon]; mu_dot may be NULL (finite differences). */
DSM_API dsm_status dsm_lemma_create(dsm_scalar_fn gamma, dsm_scalar2_fn alpha, dsm_scalar_fn beta,
                                    dsm_scalar_fn mu, dsm_scalar_fn mu_dot, void* user, double g0,
                                    double horizon, const double* grid, int n_grid,
                                    dsm_lemma** out);

DSM_API dsm_status dsm_lemma_check_conditions(const dsm_lemma* lemma, double* margin_out,
                                              int* condition10_ok_out);

/* phi_out must hold n_grid values; blew_up/blowup_time may be NULL. */
DSM_API dsm_status dsm_lemma_integrate_phi(const dsm_lemma* lemma, double* phi_out,
                                           int* blew_up_out, double* blowup_time_out);

DSM_API dsm_status dsm_lemma_verify_sandwich(const dsm_lemma* lemma, const double* g_samples,
                                             dsm_report** report_out);

DSM_API void dsm_lemma_free(dsm_lemma* lemma);

/* ---- regularized path ------------------------------------------------------ */

DSM_API dsm_status dsm_solve_regularized(const dsm_problem* problem, double a_re, double a_im,
                                         const double* guess, double* w_out, double* residual_out,
                                         int* iters_out);

/* Warm-start continuation along decreasing |a| on the problem's ray. */
DSM_API dsm_status dsm_path_track(const dsm_problem* problem, const double* a_moduli, int n_values,
                                  const double* w_start, dsm_path** out);
DSM_API int dsm_path_size(const dsm_path* path);
DSM_API dsm_status dsm_path_entry(const dsm_path* path, int index, double* a_abs_out,
                                  double* w_out, double* residual_out, int* newton_iters_out);
DSM_API dsm_status dsm_path_limit(const dsm_path* path, double* w_out);
DSM_API dsm_status dsm_path_write_csv(const dsm_path* path, const dsm_problem* problem,
                                      const char* file);
DSM_API void dsm_path_free(dsm_path* path);

/* Minimal-norm solution of the (possibly rank-deficient) linear system
 * A y = f via (A^T A + aI)^{-1} A^T f along a decreasing shift sequence.
 * history_out (optional) receives n_shifts - 1 step norms. */
DSM_API dsm_status dsm_normal_solution(const double* a_row_major, int rows, int cols,
                                       const double* f, const double* a_shifts, int n_shifts,
                                       double* y_out, double* history_out);

/* ---- flow integration ------------------------------------------------------ */

/* Options: rel_tol, abs_tol, initial_step, t_max, stop_residual,
 * oracle_samples, max_steps. */
DSM_API dsm_status dsm_solve(const dsm_problem* problem, const dsm_schedule* schedule,
                             const double* u0, const dsm_options* options,
                             dsm_trajectory** out);

DSM_API int dsm_trajectory_size(const dsm_trajectory* trajectory);
/* Status string: Converged, HorizonReached, StepFailure, ResolventFailure. */
DSM_API const char* dsm_trajectory_status(const dsm_trajectory* trajectory);
/* dist_to_w/dist_to_y are set to NaN where not measured. */
DSM_API dsm_status dsm_trajectory_point(const dsm_trajectory* trajectory, int index, double* t,
                                        double* r, double* residual, double* envelope,
                                        double* dist_to_w, double* dist_to_y);
DSM_API dsm_status dsm_trajectory_final(const dsm_trajectory* trajectory, double* t_out,
                                        double* u_out);
DSM_API dsm_status dsm_trajectory_write_csv(const dsm_trajectory* trajectory, const char* file);
DSM_API dsm_status dsm_trajectory_envelope_check(const dsm_trajectory* trajectory,
                                                 double tol_env, dsm_report** report_out);
DSM_API void dsm_trajectory_free(dsm_trajectory* trajectory);

/* ---- high-level runs (the CLI maps onto these) ----------------------------- */

/* problem_spec: gallery name or problem-file path. out_dir may be NULL for
 * no files. Returns DSM_OK even for runs whose exit code is nonzero; the
 * report's "exit_code" field carries the CLI exit code. */
DSM_API dsm_status dsm_run_solve(const char* problem_spec, const dsm_options* options,
                                 const char* out_dir, dsm_report** report_out);

/* Derive constants and the schedule, validate gates, no integration. */
DSM_API dsm_status dsm_run_schedule(const char* problem_spec, const dsm_options* options,
                                    dsm_report** report_out);

/* suite: all, operator, schedule, lemma1, path, theorem. */
DSM_API dsm_status dsm_run_verify(const char* suite, const dsm_options* options,
                                  dsm_report** report_out);

/* baselines: comma-separated subset of newton-plain,fixed-a,geometric-a. */
DSM_API dsm_status dsm_run_bench(const char* problem_spec, const char* baselines,
                                 const dsm_options* options, dsm_report** report_out);

#ifdef __cplusplus
}
#endif

#endif /* DSM_H */
