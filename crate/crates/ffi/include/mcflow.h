#ifndef MCFLOW_H
#define MCFLOW_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum McfStatus {
  MCF_STATUS_OK = 0,
  MCF_STATUS_NULL_POINTER = 1,
  MCF_STATUS_INVALID_UTF8 = 2,
  MCF_STATUS_PARSE_ERROR = 3,
  MCF_STATUS_EVAL_ERROR = 4,
  MCF_STATUS_PROFILE_ERROR = 5,
  MCF_STATUS_CONFIG_ERROR = 6,
  MCF_STATUS_FLOW_ERROR = 7,
  MCF_STATUS_IO_ERROR = 8,
  MCF_STATUS_INVALID_ARGUMENT = 9,
  MCF_STATUS_PANIC = 10,
} McfStatus;

/**
 * Differentiation variable for [`mcf_expr_diff`].
 */
typedef enum McfVar {
  MCF_VAR_U = 0,
  MCF_VAR_X1 = 1,
  MCF_VAR_X2 = 2,
} McfVar;

/**
 * Parsed expression in `x1`, `x2`, `u`.
 */
typedef struct McfExpr McfExpr;

/**
 * Warped profile `φ` with its chart `Φ` anchored at the domain midpoint.
 */
typedef struct McfProfile McfProfile;

/**
 * Finished run: summary, trace and final field.
 */
typedef struct McfRun McfRun;

/**
 * One trace row. Energy columns are NaN when the run has no energy weights.
 */
typedef struct McfSample {
  double t;
  double sup_ut;
  double sup_omega;
  double min_u;
  double max_u;
  double energy;
  double cumulative_dissipation;
} McfSample;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failing call on this thread, or null. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *mcf_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *mcf_version(void);

/**
 * Parses `text` into a new expression handle.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a writable pointer.
 */
enum McfStatus mcf_expr_parse(const char *text, struct McfExpr **out);

/**
 * Evaluates at base point `x[0..nx]` and height `u`.
 *
 * # Safety
 * `expr` must come from this library; `x` must point to `nx` doubles
 * (it may be null when `nx == 0`).
 */
enum McfStatus mcf_expr_eval(const struct McfExpr *expr,
                             const double *x,
                             size_t nx,
                             double u,
                             double *out);

/**
 * Symbolic derivative as a new handle.
 *
 * # Safety
 * `expr` must come from this library and `out` must be writable.
 */
enum McfStatus mcf_expr_diff(const struct McfExpr *expr, enum McfVar var, struct McfExpr **out);

/**
 * Writes the canonical text of `expr` into `buf` (NUL-terminated, truncated
 * to `len`) and the full length without NUL into `needed`.
 *
 * # Safety
 * `buf` must hold `len` bytes or be null with `len == 0`.
 */
enum McfStatus mcf_expr_to_string(const struct McfExpr *expr,
                                  char *buf,
                                  size_t len,
                                  size_t *needed);

/**
 * # Safety
 * `expr` must come from [`mcf_expr_parse`] or [`mcf_expr_diff`], or be null.
 */
void mcf_expr_free(struct McfExpr *expr);

/**
 * Builds the profile of `phi` (a function of `u` only) on `[lo, hi]`.
 *
 * # Safety
 * `phi` must come from this library and `out` must be writable.
 */
enum McfStatus mcf_profile_new(const struct McfExpr *phi,
                               double lo,
                               double hi,
                               struct McfProfile **out);

/**
 * Chart value `Φ(u)`.
 *
 * # Safety
 * `profile` must come from this library and `out` must be writable.
 */
enum McfStatus mcf_profile_transform(const struct McfProfile *profile, double u, double *out);

/**
 * Height `Φ⁻¹(y)`.
 *
 * # Safety
 * `profile` must come from this library and `out` must be writable.
 */
enum McfStatus mcf_profile_inverse(const struct McfProfile *profile, double y, double *out);

/**
 * # Safety
 * `profile` must come from [`mcf_profile_new`], or be null.
 */
void mcf_profile_free(struct McfProfile *profile);

/**
 * Height at `t_end` of the slice starting at `r0`, on a `dim`-torus.
 *
 * # Safety
 * `profile` must come from this library and `out` must be writable.
 */
enum McfStatus mcf_slice_ode(const struct McfProfile *profile,
                             uint32_t dim,
                             double r0,
                             double t_end,
                             double dt,
                             double *out);

/**
 * Evaluates the hypotheses of a TOML run config; `passed` receives 1 or 0.
 *
 * # Safety
 * `config` must be a NUL-terminated string and `passed` writable.
 */
enum McfStatus mcf_check_config(const char *config, int32_t *passed);

/**
 * Runs a TOML config, writing the run directory to `out_dir`. A run that
 * ends in divergence or a failed monitor still succeeds here; inspect
 * [`mcf_run_exit_code`].
 *
 * # Safety
 * `config` and `out_dir` must be NUL-terminated strings and `out` writable.
 */
enum McfStatus mcf_run_config(const char *config,
                              const char *out_dir,
                              bool skip_check,
                              struct McfRun **out);

/**
 * Exit code the CLI would report for this run.
 *
 * # Safety
 * `run` must come from [`mcf_run_config`].
 */
int32_t mcf_run_exit_code(const struct McfRun *run);

/**
 * Number of trace samples; zero when the run stopped at the hypotheses.
 *
 * # Safety
 * `run` must come from [`mcf_run_config`].
 */
size_t mcf_run_sample_count(const struct McfRun *run);

/**
 * # Safety
 * `run` must come from [`mcf_run_config`] and `out` must be writable.
 */
enum McfStatus mcf_run_sample(const struct McfRun *run, size_t index, struct McfSample *out);

/**
 * Copies the final flow variable (chart values for warped kinds) into
 * `buf`, which must hold the grid size reported through `needed`. Call with
 * `len == 0` to query the size.
 *
 * # Safety
 * `run` must come from [`mcf_run_config`]; `buf` must hold `len` doubles.
 */
enum McfStatus mcf_run_final_field(const struct McfRun *run,
                                   double *buf,
                                   size_t len,
                                   size_t *needed);

/**
 * # Safety
 * `run` must come from [`mcf_run_config`], or be null.
 */
void mcf_run_free(struct McfRun *run);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MCFLOW_H */
