#ifndef SPINCOMB_H
#define SPINCOMB_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result classes surfaced over the C ABI. Numeric values mirror the CLI
 * exit codes where one exists.
 */
typedef enum SpincombStatus {
  SPINCOMB_STATUS_OK = 0,
  /**
   * A pointer argument was null or otherwise unusable.
   */
  SPINCOMB_STATUS_INVALID_ARGUMENT = 1,
  /**
   * Bad configuration JSON, geometry, or call ordering.
   */
  SPINCOMB_STATUS_CONFIG_ERROR = 2,
  /**
   * Calibration references did not clear the noise floor.
   */
  SPINCOMB_STATUS_CALIBRATION_ERROR = 3,
  /**
   * The requested step size cannot resolve the dynamics.
   */
  SPINCOMB_STATUS_STABILITY_ERROR = 4,
  /**
   * A panic was caught at the boundary; state may be stale.
   */
  SPINCOMB_STATUS_INTERNAL_ERROR = 5,
} SpincombStatus;

/**
 * Opaque simulator instance (configuration, cluster, calibration state).
 */
typedef struct SpincombExperiment SpincombExperiment;

/**
 * Opaque run outcome (decoded word, slot amplitudes, report fields).
 */
typedef struct SpincombResult SpincombResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * ABI revision of this header/library pair.
 */
uint32_t spincomb_abi_version(void);

/**
 * Message describing this thread's most recent failure.
 *
 * The pointer stays valid until the next failing `spincomb_*` call on
 * the same thread; do not free it.
 */
const char *spincomb_last_error_message(void);

/**
 * Build an experiment from configuration JSON (same schema as the CLI's
 * `--config` file). On success writes a handle to `out`.
 *
 * # Safety
 * `config_json` must point to a NUL-terminated string; `out` must point
 * to writable storage for one pointer.
 */
enum SpincombStatus spincomb_experiment_new(const char *config_json,
                                            struct SpincombExperiment **out);

/**
 * Release an experiment handle. Passing null is a no-op.
 *
 * # Safety
 * `experiment` must be a handle from [`spincomb_experiment_new`] that
 * has not been freed already.
 */
void spincomb_experiment_free(struct SpincombExperiment *experiment);

/**
 * Write the all-ones comb and store the slot references used by later
 * decodes. Must succeed before `spincomb_run_encode` / `spincomb_run_not`.
 *
 * # Safety
 * `experiment` must be a live handle from [`spincomb_experiment_new`].
 */
enum SpincombStatus spincomb_calibrate(struct SpincombExperiment *experiment);

/**
 * Encode `value` and read it back. Writes a result handle to `out`.
 *
 * # Safety
 * `experiment` must be a live handle; `out` must point to writable
 * storage for one pointer.
 */
enum SpincombStatus spincomb_run_encode(struct SpincombExperiment *experiment,
                                        uint64_t value,
                                        struct SpincombResult **out);

/**
 * Run the parallel bitwise NOT of `value` (write all-ones, erase the
 * slots where `value` has ones). Writes a result handle to `out`.
 *
 * # Safety
 * `experiment` must be a live handle; `out` must point to writable
 * storage for one pointer.
 */
enum SpincombStatus spincomb_run_not(struct SpincombExperiment *experiment,
                                     uint64_t value,
                                     struct SpincombResult **out);

/**
 * Release a result handle. Passing null is a no-op.
 *
 * # Safety
 * `result` must be a handle from a `spincomb_run_*` call that has not
 * been freed already.
 */
void spincomb_result_free(struct SpincombResult *result);

/**
 * Decoded word as an integer (bit k of the word = slot k).
 *
 * # Safety
 * `result` must be a live result handle; `value` must point to writable
 * storage for one `uint64_t`.
 */
enum SpincombStatus spincomb_result_value(const struct SpincombResult *result, uint64_t *value);

/**
 * Number of bits in the decoded word.
 *
 * # Safety
 * `result` must be a live result handle; `count` must point to writable
 * storage for one `size_t`.
 */
enum SpincombStatus spincomb_result_bit_count(const struct SpincombResult *result,
                                              uintptr_t *count);

/**
 * Copy the decoded bits, least significant first, one byte per bit.
 * `len` must be at least the value from [`spincomb_result_bit_count`].
 *
 * # Safety
 * `result` must be a live result handle; `buffer` must point to at
 * least `len` writable bytes.
 */
enum SpincombStatus spincomb_result_bits(const struct SpincombResult *result,
                                         uint8_t *buffer,
                                         uintptr_t len);

/**
 * Copy the per-slot spectral amplitudes. `len` must be at least the bit
 * count.
 *
 * # Safety
 * `result` must be a live result handle; `buffer` must point to at
 * least `len` writable doubles.
 */
enum SpincombStatus spincomb_result_slot_amplitudes(const struct SpincombResult *result,
                                                    double *buffer,
                                                    uintptr_t len);

/**
 * Full run summary as a JSON string (same shape as the CLI's
 * result.json). On success writes a caller-owned string to `out`;
 * release it with [`spincomb_string_free`].
 *
 * # Safety
 * `result` must be a live result handle; `out` must point to writable
 * storage for one pointer.
 */
enum SpincombStatus spincomb_result_json(const struct SpincombResult *result, char **out);

/**
 * Release a string returned by this library. Passing null is a no-op.
 *
 * # Safety
 * `text` must be a pointer from a `spincomb_*_json` call that has not
 * been freed already.
 */
void spincomb_string_free(char *text);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPINCOMB_H */
