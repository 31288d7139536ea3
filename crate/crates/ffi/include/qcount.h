#ifndef QCOUNT_H
#define QCOUNT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum QcStatus {
  QC_STATUS_OK = 0,
  QC_STATUS_NULL_POINTER = 1,
  /**
   * A string argument was not UTF-8 or not valid JSON for its type.
   */
  QC_STATUS_INVALID_INPUT = 2,
  /**
   * A matrix failed validation (shape, Hermiticity, positivity, trace).
   */
  QC_STATUS_INVALID_STATE = 3,
  /**
   * A Kraus family or channel operation was rejected.
   */
  QC_STATUS_INVALID_CHANNEL = 4,
  /**
   * A tolerance or size parameter outside its domain.
   */
  QC_STATUS_OUT_OF_RANGE = 5,
  /**
   * Operands live on incompatible spaces.
   */
  QC_STATUS_MISMATCH = 6,
  /**
   * The computation ran but could not produce a result, e.g. an index
   * past the end of a catalog.
   */
  QC_STATUS_NOT_FOUND = 7,
  QC_STATUS_PANIC = 8,
} QcStatus;

typedef struct QcChannel QcChannel;

typedef struct QcDensity QcDensity;

typedef struct QcMachine QcMachine;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until
 * the next call into this library from the same thread.
 */
const char *qc_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *qc_version(void);

/**
 * # Safety
 * `s` must be null or a pointer previously returned by this library.
 */
void qc_string_free(char *s);

/**
 * Parses `{"n": …, "re": [[…]], "im": [[…]]}`. With `n` present the
 * operator lives on the qubit strings of length ≤ n.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum QcStatus qc_density_from_json(const char *json, struct QcDensity **out);

/**
 * `|s⟩⟨s|` for a binary string `s` (empty string allowed) on strings of
 * length ≤ n.
 *
 * # Safety
 * `bits` must be a NUL-terminated string; `out` must be writable.
 */
enum QcStatus qc_density_basis(uintptr_t n, const char *bits, struct QcDensity **out);

/**
 * `I/d` on the qubit strings of length ≤ n.
 *
 * # Safety
 * `out` must be writable.
 */
enum QcStatus qc_density_maximally_mixed(uintptr_t n, struct QcDensity **out);

/**
 * # Safety
 * `rho` must be a live handle; `out` must be writable.
 */
enum QcStatus qc_density_dim(const struct QcDensity *rho, uintptr_t *out);

/**
 * # Safety
 * `rho` must be a live handle; `out` receives a string for `qc_string_free`.
 */
enum QcStatus qc_density_to_json(const struct QcDensity *rho, char **out);

/**
 * # Safety
 * `rho` must be null or a handle not yet freed.
 */
void qc_density_free(struct QcDensity *rho);

/**
 * # Safety
 * Both handles must be live; `out` must be writable.
 */
enum QcStatus qc_trace_distance(const struct QcDensity *a, const struct QcDensity *b, double *out);

/**
 * Entropy in bits.
 *
 * # Safety
 * `rho` must be live; `out` must be writable.
 */
enum QcStatus qc_von_neumann_entropy(const struct QcDensity *rho, double *out);

/**
 * `S(a‖b)` in bits; `+∞` when the support of `a` leaves that of `b`.
 *
 * # Safety
 * Both handles must be live; `out` must be writable.
 */
enum QcStatus qc_relative_entropy(const struct QcDensity *a,
                                  const struct QcDensity *b,
                                  double *out);

/**
 * Largest count of orthonormal states a `d`-dimensional input can be
 * mapped within trace distance `delta` of, in bits.
 *
 * # Safety
 * `out` must be writable.
 */
enum QcStatus qc_counting_bound(uintptr_t d, double delta, double *out);

/**
 * `2T log₂ d + η(2T)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum QcStatus qc_fannes_bound(double t, uintptr_t d, double *out);

/**
 * Parses `{"in_dim", "out_dim", "kraus": [{"re", "im"}, …]}` and checks
 * trace preservation.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum QcStatus qc_channel_from_json(const char *json, struct QcChannel **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum QcStatus qc_channel_depolarizing_qubit(double p, struct QcChannel **out);

/**
 * # Safety
 * `ch` must be live; `out` receives a string for `qc_string_free`.
 */
enum QcStatus qc_channel_to_json(const struct QcChannel *ch, char **out);

/**
 * # Safety
 * `ch` and `rho` must be live; `out` must be writable.
 */
enum QcStatus qc_channel_apply(const struct QcChannel *ch,
                               const struct QcDensity *rho,
                               struct QcDensity **out);

/**
 * Minimum Choi eigenvalue and `‖Σ K†K − I‖`.
 *
 * # Safety
 * `ch` must be live; both outputs must be writable.
 */
enum QcStatus qc_channel_cptp(const struct QcChannel *ch,
                              double *min_choi_eigenvalue,
                              double *completeness_residual);

/**
 * Searches for inputs mapped near each target and reports the count
 * against the counting bound. `targets_json` is an array of
 * `{"re": […], "im": […]}` vectors; the result is a JSON report.
 *
 * # Safety
 * `ch` must be live; `targets_json` NUL-terminated; `out` writable.
 */
enum QcStatus qc_verify_counting(const struct QcChannel *ch,
                                 const char *targets_json,
                                 double delta,
                                 uint64_t seed,
                                 char **out);

/**
 * # Safety
 * `ch` must be null or a handle not yet freed.
 */
void qc_channel_free(struct QcChannel *ch);

/**
 * Builds a machine of the named family (`identity`, `basis-permutation`,
 * `seeded-random-unitary`, `dephasing-compose`) on inputs of length ≤ n.
 *
 * # Safety
 * `family` must be NUL-terminated; `out` must be writable.
 */
enum QcStatus qc_machine_new(const char *family,
                             uintptr_t n,
                             uint64_t seed,
                             struct QcMachine **out);

/**
 * # Safety
 * `m` and `rho` must be live; `out` must be writable.
 */
enum QcStatus qc_machine_run(const struct QcMachine *m,
                             const struct QcDensity *rho,
                             struct QcDensity **out);

/**
 * Catalog of strings the machine produces within `delta`, as JSON. A
 * non-positive `net_epsilon` selects the default net for the machine's n.
 *
 * # Safety
 * `m` must be live; `out` must be writable.
 */
enum QcStatus qc_machine_enumerate(const struct QcMachine *m,
                                   double delta,
                                   double net_epsilon,
                                   char **out);

/**
 * # Safety
 * `m` must be null or a handle not yet freed.
 */
void qc_machine_free(struct QcMachine *m);

/**
 * Output of a program on the classical reference machine. `halted` is 0
 * and `out` untouched when the program never halts within the step limit.
 *
 * # Safety
 * `program` must be NUL-terminated; `halted` and `out` writable.
 */
enum QcStatus qc_classical_run(const char *program, int32_t *halted, char **out);

/**
 * Length of the shortest program of length ≤ `lmax` printing `x`, or −1.
 *
 * # Safety
 * `x` must be NUL-terminated; `out` writable.
 */
enum QcStatus qc_classical_complexity(const char *x, uintptr_t lmax, int64_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QCOUNT_H */
