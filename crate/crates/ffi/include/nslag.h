#ifndef NSLAG_H
#define NSLAG_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes shared by every entry point.
 */
typedef enum NslagStatus {
  NSLAG_STATUS_OK = 0,
  NSLAG_STATUS_NULL_ARGUMENT = 1,
  NSLAG_STATUS_INVALID_UTF8 = 2,
  NSLAG_STATUS_INVALID_CONFIG = 3,
  NSLAG_STATUS_DOMAIN_ERROR = 4,
  NSLAG_STATUS_STEP_FAILURE = 5,
  NSLAG_STATUS_IO = 6,
  NSLAG_STATUS_BUFFER_TOO_SMALL = 7,
  NSLAG_STATUS_PANIC = 8,
} NslagStatus;

/**
 * Opaque simulation handle.
 */
typedef struct NslagSim NslagSim;

typedef struct NslagEnergy {
  double t;
  double energy;
  double dissipation;
  double cum_dissipation;
} NslagEnergy;

typedef struct NslagBounds {
  double t;
  double vmin;
  double vmax;
  double thmin;
  double thmax;
  double ninf_u;
  double n2_u;
  double gradient_l2;
  double farfield_dev;
} NslagBounds;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *nslag_version(void);

/**
 * Message of the last failed call on this thread, or NULL. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *nslag_last_error_message(void);

/**
 * Creates a simulation from `key = value` configuration text.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a writable pointer.
 */
enum NslagStatus nslag_sim_from_config_str(const char *text, struct NslagSim **out);

/**
 * Creates a simulation from a configuration file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a writable pointer.
 */
enum NslagStatus nslag_sim_from_config_file(const char *path, struct NslagSim **out);

/**
 * Releases a handle; NULL is ignored.
 *
 * # Safety
 * `sim` must come from a constructor of this library and not be used again.
 */
void nslag_sim_free(struct NslagSim *sim);

/**
 * Advances to `min(t, t_final)`. On a step failure the handle keeps the last
 * accepted state.
 *
 * # Safety
 * `sim` must be a live handle.
 */
enum NslagStatus nslag_sim_advance(struct NslagSim *sim, double t);

/**
 * Advances to the configured final time.
 *
 * # Safety
 * `sim` must be a live handle.
 */
enum NslagStatus nslag_sim_run_to_end(struct NslagSim *sim);

/**
 * # Safety
 * `sim` must be a live handle and `out` writable.
 */
enum NslagStatus nslag_sim_time(const struct NslagSim *sim, double *out);

/**
 * # Safety
 * `sim` must be a live handle and `out` writable.
 */
enum NslagStatus nslag_sim_num_cells(const struct NslagSim *sim, size_t *out);

/**
 * Copies the fields into caller buffers. `v` and `theta` hold `n_cells`
 * values, `u` holds `n_cells + 1`; `n_cells` must match the grid.
 *
 * # Safety
 * `sim` must be a live handle and each buffer valid for its length.
 */
enum NslagStatus nslag_sim_copy_state(const struct NslagSim *sim,
                                      double *v,
                                      double *theta,
                                      double *u,
                                      size_t n_cells);

/**
 * # Safety
 * `sim` must be a live handle and `out` writable.
 */
enum NslagStatus nslag_sim_energy(const struct NslagSim *sim, struct NslagEnergy *out);

/**
 * # Safety
 * `sim` must be a live handle and `out` writable.
 */
enum NslagStatus nslag_sim_bounds(const struct NslagSim *sim, struct NslagBounds *out);

/**
 * Writes the run report as JSON into a new string released with
 * `nslag_string_free`. The run must have reached its final time.
 *
 * # Safety
 * `sim` must be a live handle and `out` writable.
 */
enum NslagStatus nslag_sim_report_json(const struct NslagSim *sim, char **out);

/**
 * Releases a string returned by this library; NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used again.
 */
void nslag_string_free(char *s);

/**
 * Both roots of `y - ln y - 1 = e0`.
 *
 * # Safety
 * `alpha1` and `alpha2` must be writable.
 */
enum NslagStatus nslag_entropy_roots(double e0, double *alpha1, double *alpha2);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NSLAG_H */
