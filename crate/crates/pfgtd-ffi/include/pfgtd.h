#ifndef PFGTD_H
#define PFGTD_H

/* Generated by cbindgen from pfgtd-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes for every fallible call.
typedef enum PfgtdStatus {
  PFGTD_STATUS_OK = 0,
  PFGTD_STATUS_NULL_POINTER = 1,
  PFGTD_STATUS_INVALID_ARGUMENT = 2,
  PFGTD_STATUS_UNKNOWN_NAME = 3,
  PFGTD_STATUS_CONSTRUCTION_FAILED = 4,
  PFGTD_STATUS_DIMENSION_MISMATCH = 5,
  PFGTD_STATUS_PANIC = 6,
} PfgtdStatus;

// An environment handle (an exact MDP).
typedef struct PfgtdEnv PfgtdEnv;

// A policy-evaluation learner (parameter-free or baseline).
typedef struct PfgtdLearner PfgtdLearner;

// An exact-model handle for ground-truth metrics.
typedef struct PfgtdModel PfgtdModel;

// A seeded transition sampler bound to an environment.
typedef struct PfgtdSampler PfgtdSampler;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static C string.
const char *pfgtd_version(void);

// Creates an environment by registry name (for example "baird" or
// "random-walk-tabular"). The multi-scale stream is not an MDP and is not
// exposed through this ABI.
//
// # Safety
// `name` must be a valid NUL-terminated string and `out` a valid pointer.
enum PfgtdStatus pfgtd_env_create(const char *name, struct PfgtdEnv **out);

// Destroys an environment handle. A null pointer is a no-op.
//
// # Safety
// `env` must be a pointer previously returned by `pfgtd_env_create`.
void pfgtd_env_destroy(struct PfgtdEnv *env);

// Feature dimensionality of the environment.
//
// # Safety
// `env` and `out` must be valid pointers.
enum PfgtdStatus pfgtd_env_dim(const struct PfgtdEnv *env, size_t *out);

// Discount factor of the environment.
//
// # Safety
// `env` and `out` must be valid pointers.
enum PfgtdStatus pfgtd_env_gamma(const struct PfgtdEnv *env, double *out);

// Creates a seeded sampler. Identical seeds give identical streams.
//
// # Safety
// `env` and `out` must be valid pointers.
enum PfgtdStatus pfgtd_sampler_create(const struct PfgtdEnv *env,
                                      uint64_t seed,
                                      struct PfgtdSampler **out);

// Destroys a sampler handle. A null pointer is a no-op.
//
// # Safety
// `sampler` must be a pointer previously returned by `pfgtd_sampler_create`.
void pfgtd_sampler_destroy(struct PfgtdSampler *sampler);

// Draws the next transition into caller-provided buffers of length `len`
// (the environment dimension).
//
// # Safety
// All pointers must be valid; `phi` and `phi_next` must reference buffers
// of at least `len` doubles.
enum PfgtdStatus pfgtd_sampler_next(struct PfgtdSampler *sampler,
                                    const struct PfgtdEnv *env,
                                    double *phi,
                                    double *phi_next,
                                    size_t len,
                                    double *reward,
                                    double *rho);

// Builds the exact model. `objective`: 0 = MSPBE, 1 = NEU.
//
// # Safety
// `env` and `out` must be valid pointers.
enum PfgtdStatus pfgtd_model_create(const struct PfgtdEnv *env,
                                    int32_t objective,
                                    struct PfgtdModel **out);

// Destroys a model handle. A null pointer is a no-op.
//
// # Safety
// `model` must be a pointer previously returned by `pfgtd_model_create`.
void pfgtd_model_destroy(struct PfgtdModel *model);

// Root mean-square projected Bellman error of a parameter vector.
//
// # Safety
// `model`, `theta` (length `len`), and `out` must be valid pointers.
enum PfgtdStatus pfgtd_model_rmspbe(const struct PfgtdModel *model,
                                    const double *theta,
                                    size_t len,
                                    double *out);

// Duality gap of `(theta, y)` over feasible balls of radius `radius`.
//
// # Safety
// `model`, `theta`, `y` (length `len`), and `out` must be valid pointers.
enum PfgtdStatus pfgtd_model_duality_gap(const struct PfgtdModel *model,
                                         const double *theta,
                                         const double *y,
                                         size_t len,
                                         double radius,
                                         double *out);

// Copies the MSPBE minimizer into a caller buffer of length `len`.
//
// # Safety
// `model` and `out` (length `len`) must be valid pointers.
enum PfgtdStatus pfgtd_model_theta_star(const struct PfgtdModel *model, double *out, size_t len);

// Creates a parameter-free learner. `variant`: 0 = PF, 1 = CW-PF, 2 = PF+.
// When `warm_start` is nonzero the environment's standard initialization is
// applied (currently only the star counterexample defines one).
//
// # Safety
// `env` and `out` must be valid pointers.
enum PfgtdStatus pfgtd_learner_create(const struct PfgtdEnv *env,
                                      int32_t variant,
                                      double radius,
                                      double initial_wealth,
                                      double initial_hint,
                                      bool warm_start,
                                      struct PfgtdLearner **out);

// Creates a baseline learner. `algo`: 0 = TD, 1 = GTD2, 2 = TDC, 3 = TDRC.
//
// # Safety
// `env` and `out` must be valid pointers.
enum PfgtdStatus pfgtd_baseline_create(const struct PfgtdEnv *env,
                                       int32_t algo,
                                       double alpha,
                                       struct PfgtdLearner **out);

// Destroys a learner handle. A null pointer is a no-op.
//
// # Safety
// `learner` must be a pointer previously returned by a learner constructor.
void pfgtd_learner_destroy(struct PfgtdLearner *learner);

// Feeds one transition to the learner.
//
// # Safety
// `learner`, `phi`, and `phi_next` (length `len`) must be valid pointers.
enum PfgtdStatus pfgtd_learner_step(struct PfgtdLearner *learner,
                                    const double *phi,
                                    const double *phi_next,
                                    size_t len,
                                    double reward,
                                    double rho);

// Copies the learner's value-function parameters into a caller buffer.
// `averaged` nonzero selects the running average (the parameter-free
// learners' canonical estimate); zero selects the current point.
//
// # Safety
// `learner` and `out` (length `len`) must be valid pointers.
enum PfgtdStatus pfgtd_learner_estimate(struct PfgtdLearner *learner,
                                        bool averaged,
                                        double *out,
                                        size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PFGTD_H */
