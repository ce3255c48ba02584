#ifndef VIMETRIC_H
#define VIMETRIC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum VimStatus {
  VIM_STATUS_OK = 0,
  VIM_STATUS_NULL_POINTER = 1,
  VIM_STATUS_INVALID_INPUT = 2,
  VIM_STATUS_SIZE_CAP_EXCEEDED = 3,
  VIM_STATUS_BUFFER_TOO_SMALL = 4,
  VIM_STATUS_PANIC = 5,
} VimStatus;

/**
 * Opaque probability distribution.
 */
typedef struct VimDistribution VimDistribution;

/**
 * Distances between two distributions, in nats.
 */
typedef struct VimDistance {
  /**
   * Conditional entropy of the second variable given the first.
   */
  double v_phi_psi;
  /**
   * Conditional entropy of the first variable given the second.
   */
  double v_psi_phi;
  double d;
} VimDistance;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread, or null. The pointer
 * stays valid until the next call into this library on the same thread.
 */
const char *vim_last_error(void);

/**
 * Builds a distribution from `len` doubles. With `renormalize` set, any
 * nonnegative weights are rescaled; otherwise they must sum to 1 within 1e-6.
 *
 * # Safety
 * `values` must point to `len` readable doubles and `out` to writable
 * storage for one pointer.
 */
enum VimStatus vim_distribution_new(const double *values,
                                    size_t len,
                                    bool renormalize,
                                    struct VimDistribution **out);

/**
 * Releases a distribution. Null is ignored.
 *
 * # Safety
 * `dist` must come from [`vim_distribution_new`] and not be freed twice.
 */
void vim_distribution_free(struct VimDistribution *dist);

/**
 * Number of symbols, or 0 for null.
 *
 * # Safety
 * `dist` must be null or a live handle.
 */
size_t vim_distribution_len(const struct VimDistribution *dist);

/**
 * Copies the (normalized) probabilities into `buf`.
 *
 * # Safety
 * `dist` must be a live handle and `buf` must hold `cap` doubles.
 */
enum VimStatus vim_distribution_values(const struct VimDistribution *dist, double *buf, size_t cap);

/**
 * Shannon entropy in nats.
 *
 * # Safety
 * `dist` must be a live handle and `out` writable.
 */
enum VimStatus vim_entropy(const struct VimDistribution *dist, double *out);

/**
 * Exact distance by vertex enumeration. Fails with
 * `VIM_STATUS_SIZE_CAP_EXCEEDED` when the number of spanning trees of the
 * bipartite graph exceeds `size_cap`.
 *
 * # Safety
 * `phi` and `psi` must be live handles and `out` writable.
 */
enum VimStatus vim_distance_exact(const struct VimDistribution *phi,
                                  const struct VimDistribution *psi,
                                  uint64_t size_cap,
                                  struct VimDistance *out);

/**
 * Greedy upper bound on the distance.
 *
 * # Safety
 * `phi` and `psi` must be live handles and `out` writable.
 */
enum VimStatus vim_distance_greedy(const struct VimDistribution *phi,
                                   const struct VimDistribution *psi,
                                   struct VimDistance *out);

/**
 * Best-fit reduction of `phi` to `m` symbols. Writes the block of every
 * symbol (zero-based) into `partition`, which must hold `len(phi)` entries,
 * and the entropy of the reduced distribution into `entropy_out`.
 *
 * # Safety
 * `phi` must be a live handle, `partition` must hold `partition_len`
 * entries and `entropy_out` must be writable.
 */
enum VimStatus vim_reduce_greedy(const struct VimDistribution *phi,
                                 size_t m,
                                 bool presort,
                                 size_t *partition,
                                 size_t partition_len,
                                 double *entropy_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VIMETRIC_H */
