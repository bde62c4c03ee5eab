#ifndef SEQWIT_H
#define SEQWIT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SqwClosedForm {
  SQW_CLOSED_FORM_W1_AB = 0,
  SQW_CLOSED_FORM_W1_AC = 1,
  SQW_CLOSED_FORM_W2_AB = 2,
  SQW_CLOSED_FORM_W2_AC = 3,
  SQW_CLOSED_FORM_W1_AB_Z = 4,
  SQW_CLOSED_FORM_W2_AB_Z = 5,
} SqwClosedForm;

typedef enum SqwPair {
  SQW_PAIR_AB = 0,
  SQW_PAIR_AC = 1,
} SqwPair;

typedef enum SqwScenarioKind {
  SQW_SCENARIO_KIND_W1 = 0,
  SQW_SCENARIO_KIND_W2 = 1,
} SqwScenarioKind;

typedef enum SqwStatus {
  SQW_STATUS_OK = 0,
  SQW_STATUS_NULL_POINTER = 1,
  SQW_STATUS_INVALID_STATE = 2,
  SQW_STATUS_CONFIG = 3,
  SQW_STATUS_DOMAIN = 4,
  SQW_STATUS_SUPER_QUANTUM = 5,
  SQW_STATUS_PARSE = 6,
  SQW_STATUS_IO = 7,
  SQW_STATUS_OUT_OF_RANGE = 8,
  SQW_STATUS_BUFFER_TOO_SMALL = 9,
  SQW_STATUS_PANIC = 10,
} SqwStatus;

typedef enum SqwWitnessKind {
  SQW_WITNESS_KIND_W1 = 0,
  SQW_WITNESS_KIND_W2 = 1,
} SqwWitnessKind;

/**
 * Opaque scenario handle.
 */
typedef struct SqwScenario SqwScenario;

/**
 * Opaque probability table handle.
 */
typedef struct SqwTable SqwTable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the current thread's last error message into `buf` as a
 * NUL-terminated string, truncating if needed. Returns the full message
 * length in bytes, excluding the terminator.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t sqw_last_error_message(char *buf, size_t len);

/**
 * Creates one of the two canonical scenarios.
 *
 * # Safety
 * `out` must be null or writable.
 */
enum SqwStatus sqw_scenario_canonical(enum SqwScenarioKind kind, struct SqwScenario **out);

/**
 * Parses a scenario from a NUL-terminated UTF-8 TOML document.
 *
 * # Safety
 * `toml` must be null or a valid C string; `out` must be null or writable.
 */
enum SqwStatus sqw_scenario_from_toml(const char *toml, struct SqwScenario **out);

/**
 * Serializes a scenario to TOML as a NUL-terminated string. The text length
 * (without terminator) is always stored in `out_len`; if `buf` cannot hold
 * it plus the terminator, nothing is copied and `BufferTooSmall` is returned.
 *
 * # Safety
 * `s` must be null or a live handle; `buf` must be null or point to `len`
 * writable bytes; `out_len` must be null or writable.
 */
enum SqwStatus sqw_scenario_to_toml(const struct SqwScenario *s,
                                    char *buf,
                                    size_t len,
                                    size_t *out_len);

/**
 * Releases a scenario. Null is ignored.
 *
 * # Safety
 * `s` must be null or a handle not yet freed.
 */
void sqw_scenario_free(struct SqwScenario *s);

/**
 * Simulates all 64 outcome probabilities at coupling `eps`.
 *
 * # Safety
 * `s` must be null or a live handle; `out` must be null or writable.
 */
enum SqwStatus sqw_table_build(const struct SqwScenario *s, double eps, struct SqwTable **out);

/**
 * Reads `p(b,c|x,y,z)`. `x` is in 0..3, `y`, `z` in 0..1; outcome index 0
 * is +1 and 1 is -1.
 *
 * # Safety
 * `t` must be null or a live handle; `out` must be null or writable.
 */
enum SqwStatus sqw_table_get(const struct SqwTable *t,
                             size_t x,
                             size_t y,
                             size_t z,
                             size_t b,
                             size_t c,
                             double *out);

/**
 * Releases a table. Null is ignored.
 *
 * # Safety
 * `t` must be null or a handle not yet freed.
 */
void sqw_table_free(struct SqwTable *t);

/**
 * Witness value of a table for one observer pair.
 *
 * # Safety
 * `t` must be null or a live handle; `out` must be null or writable.
 */
enum SqwStatus sqw_witness(const struct SqwTable *t,
                           enum SqwWitnessKind kind,
                           enum SqwPair pair,
                           double *out);

/**
 * Alice–Bob witness value conditioned on Charlie's setting `z`.
 *
 * # Safety
 * `t` must be null or a live handle; `out` must be null or writable.
 */
enum SqwStatus sqw_witness_given_z(const struct SqwTable *t,
                                   enum SqwWitnessKind kind,
                                   size_t z,
                                   double *out);

/**
 * Analytic witness curve of the canonical scenarios at `eps`.
 *
 * # Safety
 * `out` must be null or writable.
 */
enum SqwStatus sqw_closed_form(enum SqwClosedForm form, double eps, double *out);

/**
 * Certified min-entropy from a `W1` value.
 *
 * # Safety
 * `out` must be null or writable.
 */
enum SqwStatus sqw_h_from_w1(double w, double *out);

/**
 * Certified min-entropy from a `W2` value.
 *
 * # Safety
 * `out` must be null or writable.
 */
enum SqwStatus sqw_h_from_w2(double w, double *out);

/**
 * Bob's certified randomness for the canonical scenario of `kind`.
 *
 * # Safety
 * `out` must be null or writable.
 */
enum SqwStatus sqw_bob_certified(double eps, enum SqwWitnessKind kind, double *out);

/**
 * Charlie's certified randomness for the canonical `W1` scenario.
 *
 * # Safety
 * `out` must be null or writable.
 */
enum SqwStatus sqw_charlie_certified(double eps, double *out);

/**
 * Exact global min-entropy of the joint outcome `(b, c)`.
 *
 * # Safety
 * `t` must be null or a live handle; `out` must be null or writable.
 */
enum SqwStatus sqw_hmin_global_exact(const struct SqwTable *t, double *out);

/**
 * Exact min-entropy of Bob's outcome alone.
 *
 * # Safety
 * `t` must be null or a live handle; `out` must be null or writable.
 */
enum SqwStatus sqw_hmin_local_bob_exact(const struct SqwTable *t, double *out);

/**
 * Factorized lower estimate of the global min-entropy.
 *
 * # Safety
 * `t` must be null or a live handle; `out` must be null or writable.
 */
enum SqwStatus sqw_hmin_global_bound(const struct SqwTable *t, double *out);

/**
 * Coupling interval where both observer pairs violate the classical bound
 * of `kind`, located to width `tol`.
 *
 * # Safety
 * `lo` and `hi` must be null or writable.
 */
enum SqwStatus sqw_find_window(enum SqwWitnessKind kind, double tol, double *lo, double *hi);

/**
 * Multi-start maximization of a witness over all settings at fixed `eps`.
 * The best value goes to `out_value`; when `out_scenario` is non-null it
 * receives a new handle with the maximizing settings.
 *
 * # Safety
 * `out_value` must be null or writable; `out_scenario` null or writable.
 */
enum SqwStatus sqw_optimize(enum SqwWitnessKind kind,
                            enum SqwPair pair,
                            double eps,
                            uint64_t seed,
                            size_t restarts,
                            bool allow_mixed,
                            double *out_value,
                            struct SqwScenario **out_scenario);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* SEQWIT_H */
