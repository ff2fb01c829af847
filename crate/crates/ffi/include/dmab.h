#ifndef DMAB_H
#define DMAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum DmabStatus {
  DMAB_STATUS_OK = 0,
  DMAB_STATUS_NULL_POINTER = 1,
  DMAB_STATUS_INVALID_UTF8 = 2,
  DMAB_STATUS_INVALID_ARGUMENT = 3,
  DMAB_STATUS_CONFIG = 4,
  DMAB_STATUS_UNDEFINED_BOUND = 5,
  DMAB_STATUS_IO = 6,
  DMAB_STATUS_RUNTIME = 7,
  DMAB_STATUS_PANIC = 8,
} DmabStatus;

/**
 * Opaque Markov chain handle.
 */
typedef struct DmabChain DmabChain;

/**
 * Opaque parsed simulation config.
 */
typedef struct DmabConfig DmabConfig;

/**
 * Exact statistics of a Markov chain.
 */
typedef struct DmabChainStats {
  double mean;
  /**
   * Second-largest eigenvalue of `P^2`.
   */
  double lambda2;
  /**
   * `1 - lambda2`.
   */
  double rho;
  double pi_min;
  size_t states;
} DmabChainStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null if none.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *dmab_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void dmab_string_free(char *s);

/**
 * Two-state on/off chain with rewards 0 and 1.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum DmabStatus dmab_chain_new_two_state(double p01, double p10, struct DmabChain **out);

/**
 * Chain with `states` rewards in `(0, 1]` and a row-major transition matrix.
 *
 * # Safety
 * `rewards` must hold `states` values, `transition` `states * states`.
 */
enum DmabStatus dmab_chain_new(const double *rewards,
                               const double *transition,
                               size_t states,
                               struct DmabChain **out);

/**
 * # Safety
 * `chain` and `out` must be valid pointers.
 */
enum DmabStatus dmab_chain_stats(const struct DmabChain *chain, struct DmabChainStats *out);

/**
 * Copies the stationary distribution into `out`, which holds `len` values.
 *
 * # Safety
 * `chain` must be valid and `out` must hold `len` writable values.
 */
enum DmabStatus dmab_chain_stationary(const struct DmabChain *chain, double *out, size_t len);

/**
 * # Safety
 * `chain` must come from a `dmab_chain_new*` call and not have been freed.
 */
void dmab_chain_free(struct DmabChain *chain);

/**
 * Parses and validates a TOML simulation config.
 *
 * # Safety
 * `toml` must be a NUL-terminated string and `out` a valid pointer.
 */
enum DmabStatus dmab_config_parse(const char *toml, struct DmabConfig **out);

/**
 * Runs every seed and returns the aggregate CSV in `*out`.
 *
 * # Safety
 * `config` and `out` must be valid pointers.
 */
enum DmabStatus dmab_config_run_csv(const struct DmabConfig *config, char **out);

/**
 * Returns the bound curve of a config as `t,bound` CSV in `*out`.
 *
 * # Safety
 * `config` and `out` must be valid pointers.
 */
enum DmabStatus dmab_config_bounds_csv(const struct DmabConfig *config, char **out);

/**
 * # Safety
 * `config` must come from `dmab_config_parse` and not have been freed.
 */
void dmab_config_free(struct DmabConfig *config);

/**
 * Auction on a row-major `players x arms` value matrix. Writes the arm of
 * each player to `assignment` (length `players`).
 *
 * # Safety
 * `values` must hold `players * arms` values; `assignment` must hold
 * `players` writable entries; `surplus` and `rounds` may be null.
 */
enum DmabStatus dmab_auction(const double *values,
                             size_t players,
                             size_t arms,
                             double eps,
                             size_t *assignment,
                             double *surplus,
                             uint64_t *rounds);

/**
 * Exact maximum-surplus matching by enumeration.
 *
 * # Safety
 * As for [`dmab_auction`].
 */
enum DmabStatus dmab_brute_force_matching(const double *values,
                                          size_t players,
                                          size_t arms,
                                          size_t *assignment,
                                          double *surplus);

/**
 * Regret bound of UCB1 recomputed every `l` slots, for arm means `means`.
 *
 * # Safety
 * `means` must hold `arms` values and `out` must be valid.
 */
enum DmabStatus dmab_bound_t1(const double *means, size_t arms, uint64_t l, double t, double *out);

/**
 * Regret bound of UCB4 with cost `c` per computation.
 *
 * # Safety
 * `means` must hold `arms` values and `out` must be valid.
 */
enum DmabStatus dmab_bound_t2(const double *means, size_t arms, double c, double t, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DMAB_H */
