#ifndef BENDBEAM_H
#define BENDBEAM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status code returned by every entry point.
typedef enum bb_status {
  BB_STATUS_OK = 0,
  BB_STATUS_NULL_POINTER = 1,
  BB_STATUS_INVALID_UTF8 = 2,
  BB_STATUS_VALIDATION = 3,
  BB_STATUS_RESOURCE = 4,
  BB_STATUS_DOMAIN = 5,
  BB_STATUS_INFEASIBLE = 6,
  BB_STATUS_NUMERICAL = 7,
  BB_STATUS_IO = 8,
  BB_STATUS_BUFFER_TOO_SMALL = 9,
  BB_STATUS_PANIC = 10,
} bb_status;

// Complex field on a line or plane grid.
typedef struct bb_field bb_field;

// Parsed, validated scenario.
typedef struct bb_scenario bb_scenario;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the last error message of this thread into `buf` (NUL-terminated,
// truncated to `len`). Returns the full message length in bytes.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
size_t bb_last_error_message(char *buf, size_t len);

// Library version as a static NUL-terminated string.
const char *bb_version(void);

// Parses and validates a JSON scenario.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum bb_status bb_scenario_from_json(const char *json, struct bb_scenario **out);

// Loads a built-in scenario by name.
//
// # Safety
// `name` must be a NUL-terminated string; `out` must be writable.
enum bb_status bb_scenario_from_preset(const char *name, struct bb_scenario **out);

// Switches a scenario to reduced resolution in place.
//
// # Safety
// `scn` must be a live handle.
enum bb_status bb_scenario_reduce(struct bb_scenario *scn);

// Overrides the scenario seed.
//
// # Safety
// `scn` must be a live handle.
enum bb_status bb_scenario_set_seed(struct bb_scenario *scn, uint64_t seed);

// Runs the scenario and writes its bundle under `out_dir`.
//
// # Safety
// `scn` must be a live handle; `out_dir` a NUL-terminated path.
enum bb_status bb_scenario_run(const struct bb_scenario *scn, const char *out_dir);

// Number of sources and frequencies in the scenario.
//
// # Safety
// `scn` must be a live handle; out pointers writable.
enum bb_status bb_scenario_counts(const struct bb_scenario *scn,
                                  size_t *sources,
                                  size_t *frequencies);

// Source `source` of the scenario at z = 0, sampled for frequency `freq`.
//
// # Safety
// `scn` must be a live handle; `out` writable.
enum bb_status bb_scenario_source_field(const struct bb_scenario *scn,
                                        size_t source,
                                        size_t freq,
                                        struct bb_field **out);

// Writes the phase (rad) of each element of the first array source.
// `written` receives the element count; when `len` is too small nothing
// is copied and `BufferTooSmall` is returned.
//
// # Safety
// `scn` must be a live handle; `phases` null or `len` writable doubles.
enum bb_status bb_scenario_codeword(const struct bb_scenario *scn,
                                    double *phases,
                                    size_t len,
                                    size_t *written);

// # Safety
// `scn` must be null or a handle not yet freed.
void bb_scenario_free(struct bb_scenario *scn);

// Propagates `field` by `z_m` at `frequency_hz` with the band limit on.
//
// # Safety
// `field` must be a live handle; `out` writable.
enum bb_status bb_field_propagate(const struct bb_field *field,
                                  double frequency_hz,
                                  double z_m,
                                  struct bb_field **out);

// Grid of a field: x start, step and count, plus the y count (1 in line mode).
//
// # Safety
// `field` must be a live handle; out pointers writable.
enum bb_status bb_field_grid(const struct bb_field *field,
                             double *x_start_m,
                             double *x_step_m,
                             size_t *nx,
                             size_t *ny,
                             double *z_m);

// Copies the field as interleaved `(re, im)` doubles, x fastest.
// `len` counts doubles and must be at least twice the sample count.
//
// # Safety
// `field` must be a live handle; `values` null or `len` writable doubles.
enum bb_status bb_field_values(const struct bb_field *field, double *values, size_t len);

// Total power `Σ|E|²·ΔA` of a field.
//
// # Safety
// `field` must be a live handle; `out` writable.
enum bb_status bb_field_power(const struct bb_field *field, double *out);

// # Safety
// `field` must be null or a handle not yet freed.
void bb_field_free(struct bb_field *field);

// Main-lobe FWHM `2.278/(4βk²)^{1/3}` in metres.
//
// # Safety
// `out` must be writable.
enum bb_status bb_airy_fwhm(double beta_per_m, double frequency_hz, double *out);

// Farthest distance the lobe follows the parabola from an aperture of length `lx_m`.
//
// # Safety
// `out` must be writable.
enum bb_status bb_z_max(double lx_m, double beta_per_m, double x0_m, double z0_m, double *out);

// Focal distance of a mirror-symmetric pair, peak offset included.
//
// # Safety
// `out` must be writable.
enum bb_status bb_focal_distance(double x0_m,
                                 double z0_m,
                                 double beta_per_m,
                                 double frequency_hz,
                                 double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BENDBEAM_H */
