#ifndef ISCC_H
#define ISCC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum IsccStatus {
  ISCC_STATUS_OK = 0,
  ISCC_STATUS_NULL_POINTER = 1,
  ISCC_STATUS_INVALID_INPUT = 2,
  ISCC_STATUS_INVALID_SCENARIO = 3,
  ISCC_STATUS_INFEASIBLE = 4,
  ISCC_STATUS_BUDGET_EXCEEDED = 5,
  ISCC_STATUS_IO = 6,
  ISCC_STATUS_PARSE = 7,
  ISCC_STATUS_PANIC = 8,
} IsccStatus;

/**
 * Opaque evaluation result with the allocation that produced it.
 */
typedef struct IsccResult IsccResult;

/**
 * Opaque network scenario.
 */
typedef struct IsccScenario IsccScenario;

/**
 * PSO settings passed by value. Start from [`iscc_pso_config_default`].
 */
typedef struct IsccPsoConfig {
  size_t population;
  size_t max_iterations;
  double inertia;
  double cognitive;
  double social;
  double velocity_clamp;
  uint64_t seed;
} IsccPsoConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent call on this thread if it failed, otherwise
 * NULL. Valid until the next call into this library from the same thread.
 */
const char *iscc_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *iscc_version(void);

struct IsccPsoConfig iscc_pso_config_default(void);

/**
 * Generates a scenario. `overrides_toml` may be NULL for the defaults or a
 * TOML fragment such as `"num_bs = 5\nnum_sues = 10"`.
 *
 * # Safety
 * `overrides_toml` is NULL or a valid NUL-terminated string; `out` is a
 * valid pointer.
 */
enum IsccStatus iscc_scenario_generate(const char *overrides_toml,
                                       uint64_t seed,
                                       struct IsccScenario **out);

/**
 * # Safety
 * `path` is a valid NUL-terminated string; `out` is a valid pointer.
 */
enum IsccStatus iscc_scenario_load(const char *path, struct IsccScenario **out);

/**
 * # Safety
 * `scenario` is a live handle; `path` is a valid NUL-terminated string.
 */
enum IsccStatus iscc_scenario_save(const struct IsccScenario *scenario, const char *path);

/**
 * # Safety
 * `scenario` is a live handle; the out pointers are valid.
 */
enum IsccStatus iscc_scenario_counts(const struct IsccScenario *scenario,
                                     size_t *num_bs,
                                     size_t *num_tues,
                                     size_t *num_sues);

/**
 * # Safety
 * `scenario` is NULL or a handle not yet freed.
 */
void iscc_scenario_free(struct IsccScenario *scenario);

/**
 * Evaluates the allocation given by the communication fractions; sensing
 * takes the remainder of each frame.
 *
 * # Safety
 * `scenario` is a live handle, `tau_ub` points to `num_bs` doubles (may be
 * NULL when `num_bs` is 0) and `out` is a valid pointer.
 */
enum IsccStatus iscc_evaluate(const struct IsccScenario *scenario,
                              const double *tau_ub,
                              size_t num_bs,
                              double tau_b,
                              double tau_us,
                              double eta,
                              struct IsccResult **out);

/**
 * Runs the PSO subframe allocation with optimal partitioning.
 *
 * # Safety
 * `scenario` is a live handle, `config` is NULL (defaults) or valid, and
 * `out` is a valid pointer.
 */
enum IsccStatus iscc_pso_optimize(const struct IsccScenario *scenario,
                                  double eta,
                                  const struct IsccPsoConfig *config,
                                  struct IsccResult **out);

/**
 * Total MI (bits), total delay (s) and utility. Any out pointer may be NULL.
 *
 * # Safety
 * `result` is a live handle; non-NULL out pointers are valid.
 */
enum IsccStatus iscc_result_summary(const struct IsccResult *result,
                                    double *total_mi_bits,
                                    double *total_delay_s,
                                    double *utility);

/**
 * Copies the allocation out. `tau_ub` must hold `num_bs` doubles, matching
 * the scenario; the satellite shares go to `sat` as `[tau_b, tau_us, theta_us]`.
 *
 * # Safety
 * `result` is a live handle; `tau_ub` points to `num_bs` writable doubles
 * (may be NULL when `num_bs` is 0); `sat` points to 3 writable doubles.
 */
enum IsccStatus iscc_result_allocation(const struct IsccResult *result,
                                       double *tau_ub,
                                       size_t num_bs,
                                       double *sat);

/**
 * # Safety
 * `result` is NULL or a handle not yet freed.
 */
void iscc_result_free(struct IsccResult *result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ISCC_H */
