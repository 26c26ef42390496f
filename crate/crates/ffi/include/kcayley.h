#ifndef KCAYLEY_H
#define KCAYLEY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Longest open chain and momentum grid accepted, matching the CLI.
 */
#define KC_MAX_CELLS 400

#define KC_MAX_MOMENTA 1024

/**
 * Largest matrix accepted by the matrix-level calls.
 */
#define KC_MAX_DIM 512

/**
 * Result of every fallible call.
 */
typedef enum KcStatus {
  KC_STATUS_OK = 0,
  KC_STATUS_NULL_POINTER = 1,
  KC_STATUS_INVALID_UTF8 = 2,
  /**
   * A Rust panic was caught at the boundary; the handle may be unusable.
   */
  KC_STATUS_PANIC = 3,
  KC_STATUS_NOT_SQUARE = 10,
  KC_STATUS_SHAPE = 11,
  KC_STATUS_NON_FINITE = 12,
  KC_STATUS_STRUCTURAL = 13,
  KC_STATUS_SINGULARITY = 14,
  KC_STATUS_ILL_CONDITIONED = 15,
  KC_STATUS_CAPACITY = 16,
  KC_STATUS_PARITY = 17,
  KC_STATUS_DOMAIN = 18,
  KC_STATUS_PRECONDITION = 19,
  KC_STATUS_COMPOSITION = 20,
  KC_STATUS_GAPLESS = 21,
  KC_STATUS_BULK_GAPLESS = 22,
  KC_STATUS_NORMALIZATION = 23,
  KC_STATUS_REFINEMENT = 24,
  KC_STATUS_DEGENERATE_ENDPOINT = 25,
  KC_STATUS_INCONSISTENT = 26,
  KC_STATUS_VERIFICATION = 27,
} KcStatus;

/**
 * A one-dimensional tight-binding chain.
 */
typedef struct KcChain KcChain;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *kc_version(void);

/**
 * Message of the last failed call on this thread, or null after a
 * success. Valid until the next call into the library on this thread.
 */
const char *kc_last_error(void);

/**
 * Short name of a status code, e.g. `"bulk_gapless"`. Never null.
 */
const char *kc_status_name(enum KcStatus status);

/**
 * SSH chain with intra-cell hopping `t1` and inter-cell hopping `t2`.
 *
 * # Safety
 * `out` must point to writable storage for one pointer.
 */
enum KcStatus kc_ssh_new(double t1, double t2, struct KcChain **out);

/**
 * Kitaev chain with chemical potential `mu`, hopping `t` and pairing
 * `delta`, in the Majorana basis.
 *
 * # Safety
 * `out` must point to writable storage for one pointer.
 */
enum KcStatus kc_kitaev_new(double mu, double t, double delta, struct KcChain **out);

/**
 * Releases a chain. Null is ignored.
 *
 * # Safety
 * `chain` must come from a constructor of this library and not be freed
 * twice.
 */
void kc_chain_free(struct KcChain *chain);

/**
 * Orbitals per unit cell.
 *
 * # Safety
 * `chain` must be a live handle and `out` writable.
 */
enum KcStatus kc_chain_cell_dim(const struct KcChain *chain, size_t *out);

/**
 * Smallest absolute Bloch eigenvalue over the Brillouin zone.
 *
 * # Safety
 * `chain` must be a live handle and `out` writable.
 */
enum KcStatus kc_chain_bulk_gap(const struct KcChain *chain, double *out);

/**
 * Bulk invariant: the winding number of an SSH chain over `momenta`
 * Bloch samples, or the Majorana number (`-1` topological) of a Kitaev
 * chain, for which `momenta` is ignored. Fails with
 * `KC_STATUS_BULK_GAPLESS` when the gap closes.
 *
 * # Safety
 * `chain` must be a live handle and `out` writable.
 */
enum KcStatus kc_chain_invariant(const struct KcChain *chain, size_t momenta, int64_t *out);

/**
 * In-gap end modes of the open chain with `cells` unit cells, counted
 * within a fixed fraction of the bulk gap and split by position.
 *
 * # Safety
 * `chain` must be a live handle; `left` and `right` must be writable.
 */
enum KcStatus kc_chain_end_modes(const struct KcChain *chain,
                                 size_t cells,
                                 size_t *left,
                                 size_t *right);

/**
 * Cayley transform `(T + i)(T - i)^{-1}` of a Hermitian `n × n` matrix.
 *
 * # Safety
 * `input` must hold `2 n²` readable and `output` `2 n²` writable doubles.
 */
enum KcStatus kc_cayley(size_t n, const double *input, double *output);

/**
 * Winding number of a closed loop of `count` nonzero complex samples,
 * given as interleaved `(re, im)` pairs.
 *
 * # Safety
 * `samples` must hold `2 count` readable doubles and `out` be writable.
 */
enum KcStatus kc_winding_of_phases(size_t count, const double *samples, int64_t *out);

/**
 * Runs one command-line invocation, e.g. `{"invariant", "--model",
 * "ssh"}` without the program name, and returns the rendered report
 * in `*report` and the command's exit code in `*exit_code`. `--out` is
 * honoured only through the returned text; nothing is written to disk.
 *
 * # Safety
 * `argv` must hold `argc` NUL-terminated strings; `report` and
 * `exit_code` must be writable. Free the report with `kc_string_free`.
 */
enum KcStatus kc_run(size_t argc, const char *const *argv, char **report, int *exit_code);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void kc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KCAYLEY_H */
