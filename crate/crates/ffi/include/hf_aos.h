#ifndef HF_AOS_H
#define HF_AOS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum HfStatus {
  HF_STATUS_OK = 0,
  HF_STATUS_NULL_POINTER = 1,
  HF_STATUS_INVALID_UTF8 = 2,
  HF_STATUS_UNKNOWN_NAME = 3,
  HF_STATUS_DIMENSION = 4,
  HF_STATUS_CONFIG = 5,
  HF_STATUS_FORMAT = 6,
  HF_STATUS_PLAN = 7,
  HF_STATUS_IO = 8,
  HF_STATUS_PANIC = 9,
} HfStatus;

/**
 * Module picked by the decision policy.
 */
typedef enum HfModule {
  HF_MODULE_STATELESS = 0,
  HF_MODULE_STATE_BASED = 1,
} HfModule;

typedef struct HfModel HfModel;

typedef struct HfPolicy HfPolicy;

typedef struct HfProblem HfProblem;

typedef struct HfStateless HfStateless;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer is
 * valid until the next call into this library from the same thread.
 */
const char *hf_last_error(void);

/**
 * Library version as a static nul-terminated string.
 */
const char *hf_version(void);

/**
 * Normalised improvement `clamp((prev - new) / max(|prev|, eps), 0, 1)`.
 *
 * # Safety
 * `out_credit` must be null or point to writable memory.
 */
enum HfStatus hf_credit(double y_prev, double y_new, double *out_credit);

/**
 * Benchmark function by registry name. `shift_seed` is used only when
 * `shifted` is true.
 *
 * # Safety
 * `name` must be a nul-terminated string; `out_problem` must be writable.
 */
enum HfStatus hf_problem_function(const char *name,
                                  size_t dim,
                                  bool shifted,
                                  uint64_t shift_seed,
                                  struct HfProblem **out_problem);

/**
 * CVRPTW instance from a Solomon-format file.
 *
 * # Safety
 * `path` must be a nul-terminated string; `out_problem` must be writable.
 */
enum HfStatus hf_problem_load_instance(const char *path, struct HfProblem **out_problem);

/**
 * # Safety
 * `problem` must be null or a handle from this library not yet freed.
 */
void hf_problem_free(struct HfProblem *problem);

/**
 * Number of operators the problem's host offers.
 *
 * # Safety
 * `problem` must be a live handle; `out_k` must be writable.
 */
enum HfStatus hf_problem_num_operators(const struct HfProblem *problem, size_t *out_k);

/**
 * Evaluates a benchmark function at `x[0..len]`. Fails for CVRPTW problems.
 *
 * # Safety
 * `x` must point to `len` readable doubles; `out_value` must be writable.
 */
enum HfStatus hf_problem_evaluate(const struct HfProblem *problem,
                                  const double *x,
                                  size_t len,
                                  double *out_value);

/**
 * Loads a trained state-based model.
 *
 * # Safety
 * `path` must be a nul-terminated string; `out_model` must be writable.
 */
enum HfStatus hf_model_load(const char *path, struct HfModel **out_model);

/**
 * # Safety
 * `model` must be null or a handle from this library not yet freed.
 */
void hf_model_free(struct HfModel *model);

/**
 * One seeded run of `mode` (e.g. "hf", "sl", "random", "hf-na:0.3") with
 * default DE and DDQN settings. `model` may be null for modes that do not
 * use the state-based module. `budget` counts evaluations or moves.
 *
 * # Safety
 * Handles must be live; `mode` nul-terminated; outputs writable.
 */
enum HfStatus hf_run(const struct HfProblem *problem,
                     const char *mode,
                     const struct HfModel *model,
                     size_t budget,
                     uint64_t seed,
                     double *out_best,
                     size_t *out_evaluations);

/**
 * Adaptive-pursuit bandit over `k` operators with default parameters.
 *
 * # Safety
 * `out_aos` must be writable.
 */
enum HfStatus hf_stateless_new(size_t k, struct HfStateless **out_aos);

/**
 * # Safety
 * `aos` must be null or a handle from this library not yet freed.
 */
void hf_stateless_free(struct HfStateless *aos);

/**
 * Records `credit` for operator `op` and updates the probabilities.
 *
 * # Safety
 * `aos` must be a live handle.
 */
enum HfStatus hf_stateless_record(struct HfStateless *aos, size_t op, double credit);

/**
 * Copies the selection probabilities into `out_probs[0..len]`; `len` must
 * equal the operator count.
 *
 * # Safety
 * `out_probs` must point to `len` writable doubles.
 */
enum HfStatus hf_stateless_probabilities(const struct HfStateless *aos,
                                         double *out_probs,
                                         size_t len);

/**
 * Operator drawn by inverse CDF with the caller's uniform `u` in [0, 1).
 *
 * # Safety
 * `aos` must be a live handle; `out_op` writable.
 */
enum HfStatus hf_stateless_sample(const struct HfStateless *aos, double u, size_t *out_op);

/**
 * Adaptive decision policy with bounds `p_l <= p <= p_u`, starting at `p_u`.
 *
 * # Safety
 * `out_policy` must be writable.
 */
enum HfStatus hf_policy_new(double p_u, double p_l, struct HfPolicy **out_policy);

/**
 * # Safety
 * `policy` must be null or a handle from this library not yet freed.
 */
void hf_policy_free(struct HfPolicy *policy);

/**
 * # Safety
 * `policy` must be a live handle; `out_p` writable.
 */
enum HfStatus hf_policy_p(const struct HfPolicy *policy, double *out_p);

/**
 * Moves `p` halfway to `p_u` after an improving step, else halfway to `p_l`.
 *
 * # Safety
 * `policy` must be a live handle.
 */
enum HfStatus hf_policy_adjust(struct HfPolicy *policy, bool improved);

/**
 * Stateless module when `u < p`, otherwise state-based.
 *
 * # Safety
 * `policy` must be a live handle; `out_module` writable.
 */
enum HfStatus hf_policy_choose(const struct HfPolicy *policy, double u, enum HfModule *out_module);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HF_AOS_H */
