#ifndef RLATTICE_H
#define RLATTICE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RlStatus {
  RL_STATUS_OK = 0,
  // Input does not parse or is not a valid model.
  RL_STATUS_SCHEMA = 1,
  // A solver failed on valid input.
  RL_STATUS_SOLVER = 2,
  RL_STATUS_IO = 3,
  RL_STATUS_INTERNAL = 4,
  // A required pointer argument was null.
  RL_STATUS_NULL_ARGUMENT = 5,
  // The library panicked; the handle arguments should be considered lost.
  RL_STATUS_PANIC = 6,
} RlStatus;

// Parsed and validated lattice.
typedef struct RlLattice RlLattice;

// Eigenmodes of a lattice, ascending in frequency.
typedef struct RlModes RlModes;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. Valid until the
// next library call on this thread.
const char *rl_last_error(void);

// Releases a string returned by the library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void rl_string_free(char *s);

// Parses and validates lattice JSON.
//
// # Safety
// `json` must be a nul-terminated string; `out` must be writable.
enum RlStatus rl_lattice_from_json(const char *json, struct RlLattice **out);

// # Safety
// `l` must come from [`rl_lattice_from_json`] and not have been freed.
void rl_lattice_free(struct RlLattice *l);

// Number of resonating posts; 0 for a null handle.
//
// # Safety
// `l` must be null or a live lattice handle.
size_t rl_lattice_active_count(const struct RlLattice *l);

// Solves the eigenmodes of a lattice.
//
// # Safety
// `l` must be a live lattice handle; `out` must be writable.
enum RlStatus rl_modes_solve(const struct RlLattice *l, struct RlModes **out);

// # Safety
// `m` must come from [`rl_modes_solve`] and not have been freed.
void rl_modes_free(struct RlModes *m);

// # Safety
// `m` must be null or a live modes handle.
size_t rl_modes_count(const struct RlModes *m);

// Frequency of mode `index` in Hz.
//
// # Safety
// `m` must be a live modes handle; `out` must be writable.
enum RlStatus rl_modes_frequency(const struct RlModes *m, size_t index, double *out);

// Unit-norm current amplitude of `post_id` in mode `index`.
//
// # Safety
// `m` must be a live modes handle; `out` must be writable.
enum RlStatus rl_modes_amplitude(const struct RlModes *m,
                                 size_t index,
                                 uint32_t post_id,
                                 double *out);

// Mode classification report JSON, as written by `rlattice modes`.
//
// # Safety
// `json` must be a nul-terminated string; `out` must be writable.
enum RlStatus rl_modes_report(const char *json, char **out);

// Gap sweep: CSV into `out_csv`, sidecar JSON into `out_sidecar`.
//
// # Safety
// Inputs must be nul-terminated strings; outputs must be writable.
enum RlStatus rl_sweep(const char *lattice_json,
                       const char *spec_json,
                       char **out_csv,
                       char **out_sidecar);

// Phonon occupation CSV for a cooling request.
//
// # Safety
// `request_json` must be a nul-terminated string; `out` must be writable.
enum RlStatus rl_cool(const char *request_json, char **out);

// Transmission spectrum CSV of a grid over `count` points in `[lo_hz, hi_hz]`.
//
// # Safety
// `grid_json` must be a nul-terminated string; `out` must be writable.
enum RlStatus rl_pca_spectrum(const char *grid_json,
                              double lo_hz,
                              double hi_hz,
                              size_t count,
                              char **out);

// Field map JSON at `f_hz`; a non-positive `f_hz` selects the bare post
// resonance.
//
// # Safety
// `grid_json` must be a nul-terminated string; `out` must be writable.
enum RlStatus rl_pca_field(const char *grid_json, double f_hz, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RLATTICE_H */
