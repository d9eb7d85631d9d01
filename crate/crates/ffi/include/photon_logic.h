/* C ABI for the photon-logic simulator. Generated by cbindgen; do not edit. */

#pragma once

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum PlStatus {
  PL_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  PL_STATUS_NULL_POINTER = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  PL_STATUS_INVALID_UTF8 = 2,
  /**
   * Config text failed to parse or validate.
   */
  PL_STATUS_BAD_CONFIG = 3,
  /**
   * Argument outside the supported range (unknown kind, figure id,
   * metric name).
   */
  PL_STATUS_BAD_ARGUMENT = 4,
  /**
   * The simulation or analysis itself failed.
   */
  PL_STATUS_RUN_FAILED = 5,
} PlStatus;

/**
 * Experiment description. Opaque; create via `pl_config_preset` or
 * `pl_config_parse`, release with `pl_config_free`.
 */
typedef struct PlConfig PlConfig;

/**
 * Finished run: metrics plus provenance. Opaque; release with
 * `pl_report_free`.
 */
typedef struct PlReport PlReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static string. Do not free.
 */
const char *pl_version(void);

/**
 * Message for the most recent failure on this thread, or an empty
 * string. Caller frees with `pl_string_free`.
 */
char *pl_last_error_message(void);

/**
 * Frees a string returned by this library.
 *
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void pl_string_free(char *s);

/**
 * Builds one of the calibrated built-in configs. `kind` is one of
 * "hbt", "hom", "cnot_truth_table", "bell_zz", "bell_xx".
 *
 * # Safety
 * `kind` must be a valid NUL-terminated string; `out` must be a valid
 * pointer.
 */
enum PlStatus pl_config_preset(const char *kind, uint64_t seed, struct PlConfig **out);

/**
 * Parses and validates a config from TOML text.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string; `out` must be a valid
 * pointer.
 */
enum PlStatus pl_config_parse(const char *text, struct PlConfig **out);

/**
 * Renders a config back to TOML. Caller frees with `pl_string_free`.
 *
 * # Safety
 * `cfg` must be a live config handle; `out` must be a valid pointer.
 */
enum PlStatus pl_config_to_toml(const struct PlConfig *cfg, char **out);

/**
 * Overrides the seed.
 *
 * # Safety
 * `cfg` must be a live config handle.
 */
enum PlStatus pl_config_set_seed(struct PlConfig *cfg, uint64_t seed);

/**
 * Overrides the per-log acquisition length, in nanoseconds.
 *
 * # Safety
 * `cfg` must be a live config handle.
 */
enum PlStatus pl_config_set_duration_ns(struct PlConfig *cfg, double ns);

/**
 * Stable fingerprint of the serialized config.
 *
 * # Safety
 * `cfg` must be a live config handle; `out` must be a valid pointer.
 */
enum PlStatus pl_config_hash(const struct PlConfig *cfg, uint64_t *out);

/**
 * Releases a config handle.
 *
 * # Safety
 * `cfg` must be null or a live config handle, not yet freed.
 */
void pl_config_free(struct PlConfig *cfg);

/**
 * Simulates and analyzes in one step.
 *
 * # Safety
 * `cfg` must be a live config handle; `out` must be a valid pointer.
 */
enum PlStatus pl_run(const struct PlConfig *cfg, struct PlReport **out);

/**
 * Report as pretty JSON. Caller frees with `pl_string_free`.
 *
 * # Safety
 * `report` must be a live report handle; `out` must be a valid pointer.
 */
enum PlStatus pl_report_json(const struct PlReport *report, char **out);

/**
 * Headline scalar lookup ("g2_zero", "visibility", "similarity",
 * "expectation", "pairs", "clicks", ...).
 *
 * # Safety
 * `report` must be a live report handle; `name` a valid NUL-terminated
 * string; `out` a valid pointer.
 */
enum PlStatus pl_report_metric(const struct PlReport *report, const char *name, double *out);

/**
 * Releases a report handle.
 *
 * # Safety
 * `report` must be null or a live report handle, not yet freed.
 */
void pl_report_free(struct PlReport *report);

/**
 * Rebuilds one named figure ("1d", "1e", "2b", "2c", "3ab", "3e") and
 * returns its JSON document. Pure function of (id, seed). Caller frees
 * with `pl_string_free`.
 *
 * # Safety
 * `id` must be a valid NUL-terminated string; `out` a valid pointer.
 */
enum PlStatus pl_figure_json(const char *id, uint64_t seed, char **out);

/**
 * Same figure as CSV.
 *
 * # Safety
 * `id` must be a valid NUL-terminated string; `out` a valid pointer.
 */
enum PlStatus pl_figure_csv(const char *id, uint64_t seed, char **out);

/**
 * Cross-checks sampled two-photon transport against the permanent
 * formula on `trials` random interferometers; writes the worst
 * probability deviation.
 *
 * # Safety
 * `max_abs_delta` must be a valid pointer.
 */
enum PlStatus pl_permanent_cross_check(uint64_t seed, size_t trials, double *max_abs_delta);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus
