#ifndef DRIFTSPEC_H
#define DRIFTSPEC_H

#include <stddef.h>
#include <stdint.h>
#include <stdbool.h>

// Verdict of one inequality.
typedef enum DsCheckStatus {
  DS_CHECK_STATUS_HOLDS = 0,
  DS_CHECK_STATUS_FAILS = 1,
  DS_CHECK_STATUS_NOT_APPLICABLE = 2,
} DsCheckStatus;

// Eigenvalue numbering convention.
typedef enum DsIndexBase {
  // `Λ₁ ≤ Λ₂ ≤ …`, all positive.
  DS_INDEX_BASE_DIRICHLET = 0,
  // `0 = Λ̄₀ < Λ̄₁ ≤ …`.
  DS_INDEX_BASE_CLOSED = 1,
} DsIndexBase;

// Result code of every fallible call.
typedef enum DsStatus {
  DS_STATUS_OK = 0,
  DS_STATUS_NULL_POINTER = 1,
  DS_STATUS_INVALID_UTF8 = 2,
  DS_STATUS_INVALID_ARGUMENT = 3,
  DS_STATUS_SPECTRUM_TOO_SHORT = 4,
  DS_STATUS_INDEX_BASE = 5,
  DS_STATUS_UNKNOWN_CHECK = 6,
  DS_STATUS_MISSING_CONSTANT = 7,
  DS_STATUS_CONFIG = 8,
  DS_STATUS_PARSE = 9,
  DS_STATUS_IO = 10,
  DS_STATUS_GEOMETRY = 11,
  DS_STATUS_NUMERICAL = 12,
  DS_STATUS_BUFFER_TOO_SMALL = 13,
  DS_STATUS_PANIC = 99,
} DsStatus;

// Opaque geometric constants.
typedef struct DsConstants DsConstants;

// Opaque eigenvalue list.
typedef struct DsSpectrum DsSpectrum;

// Numbers of one evaluated check.
typedef struct DsCheckResult {
  double lhs;
  double rhs;
  // `rhs − lhs`.
  double margin;
  // Negative margin tolerated before the check fails.
  double allowance;
  enum DsCheckStatus status;
} DsCheckResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static nul-terminated string.
const char *ds_version(void);

// Message of the last failure on this thread, or null if none occurred.
//
// The pointer stays valid until the next failing call on the same thread.
const char *ds_last_error_message(void);

// Build a spectrum from `len` multiplicity-expanded values in any order.
//
// # Safety
// `values` must point to `len` readable doubles; `out` must be writable.
enum DsStatus ds_spectrum_new(const double *values,
                              size_t len,
                              enum DsIndexBase base,
                              struct DsSpectrum **out);

// Parse a spectrum from its JSON form.
//
// # Safety
// `json` must be a nul-terminated string; `out` must be writable.
enum DsStatus ds_spectrum_from_json(const char *json, struct DsSpectrum **out);

// Number of eigenvalues counted with multiplicity.
//
// # Safety
// `spectrum` must be a live handle or null (which yields 0).
size_t ds_spectrum_len(const struct DsSpectrum *spectrum);

// Copy the expanded values into `buffer`. `written` receives the full length
// even when the buffer is too small.
//
// # Safety
// `buffer` must hold `capacity` doubles; `written` must be writable.
enum DsStatus ds_spectrum_values(const struct DsSpectrum *spectrum,
                                 double *buffer,
                                 size_t capacity,
                                 size_t *written);

// Release a spectrum handle. Null is ignored.
//
// # Safety
// `spectrum` must come from this library and not be used afterwards.
void ds_spectrum_free(struct DsSpectrum *spectrum);

// Constants of an `n`-dimensional problem with curvature term `c1` and drift bound `d1`.
//
// # Safety
// `out` must be writable.
enum DsStatus ds_constants_new(size_t n, double c1, double d1, struct DsConstants **out);

// Parse constants from a TOML table, including the optional fields.
//
// # Safety
// `toml` must be a nul-terminated string; `out` must be writable.
enum DsStatus ds_constants_from_toml(const char *toml, struct DsConstants **out);

// Release a constants handle. Null is ignored.
//
// # Safety
// `constants` must come from this library and not be used afterwards.
void ds_constants_free(struct DsConstants *constants);

// Evaluate check `id` at `index` (`k` or `j`); pass a negative index for
// checks without one.
//
// # Safety
// Handles must be live, `id` nul-terminated and `out` writable.
enum DsStatus ds_check(const struct DsSpectrum *spectrum,
                       const struct DsConstants *constants,
                       const char *id,
                       int64_t index,
                       struct DsCheckResult *out);

// Run a bundled scenario and return its JSON report. `config` is optional TOML.
// Release the report with [`ds_string_free`].
//
// # Safety
// Strings must be nul-terminated (or null for `config`); `out` writable.
enum DsStatus ds_run_bundled(const char *name, const char *config, char **out);

// Run a scenario given as TOML text and return its JSON report.
//
// # Safety
// Strings must be nul-terminated (or null for `config`); `out` writable.
enum DsStatus ds_run_scenario(const char *scenario_toml, const char *config, char **out);

// Release a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not be used afterwards.
void ds_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DRIFTSPEC_H */
