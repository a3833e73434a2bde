#ifndef FROBFORGE_H
#define FROBFORGE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FrobforgeStatus {
  FROBFORGE_STATUS_OK = 0,
  FROBFORGE_STATUS_NULL_POINTER = 1,
  FROBFORGE_STATUS_INVALID_INPUT = 2,
  FROBFORGE_STATUS_MALFORMED_JSON = 3,
  FROBFORGE_STATUS_SCHEMA_VIOLATION = 4,
  FROBFORGE_STATUS_NUMERIC_FAILURE = 5,
  FROBFORGE_STATUS_PANIC = 6,
} FrobforgeStatus;

// Opaque Frobenius manifold chart.
typedef struct FrobforgeChart FrobforgeChart;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or null. The pointer stays
// valid until the next failing call on the same thread.
const char *frobforge_last_error(void);

// # Safety
// `s` must come from this library and not have been freed.
void frobforge_string_free(char *s);

// # Safety
// `chart` must come from this library and not have been freed.
void frobforge_chart_free(struct FrobforgeChart *chart);

// # Safety
// `out` must be a valid pointer.
enum FrobforgeStatus frobforge_chart_build_an(size_t n, struct FrobforgeChart **out);

// # Safety
// `out` must be a valid pointer.
enum FrobforgeStatus frobforge_chart_build_p2(uint32_t degree, struct FrobforgeChart **out);

// # Safety
// `text` must be a nul-terminated string and `out` a valid pointer.
enum FrobforgeStatus frobforge_chart_from_json(const char *text, struct FrobforgeChart **out);

// # Safety
// `chart` must be a live handle and `out` a valid pointer.
enum FrobforgeStatus frobforge_chart_to_json(const struct FrobforgeChart *chart, char **out);

// Dimension of the chart, 0 for a null handle.
//
// # Safety
// `chart` must be null or a live handle.
size_t frobforge_chart_dim(const struct FrobforgeChart *chart);

// Number of associativity residuals that are not identically zero.
//
// # Safety
// `chart` must be a live handle and `out` a valid pointer.
enum FrobforgeStatus frobforge_chart_wdvv_residuals(const struct FrobforgeChart *chart,
                                                    size_t *out);

// Canonical coordinates at `t`, sorted. `t_im` and `u_im` may be null
// for real input and output respectively.
//
// # Safety
// Arrays must hold `n` doubles, `n` being the chart dimension.
enum FrobforgeStatus frobforge_canonical_coordinates(const struct FrobforgeChart *chart,
                                                     const double *t_re,
                                                     const double *t_im,
                                                     size_t n,
                                                     double *u_re,
                                                     double *u_im);

// `G(t1) − G(t0)` along the straight segment.
//
// # Safety
// Point arrays must hold `n` doubles; imaginary arrays may be null.
enum FrobforgeStatus frobforge_g_function(const struct FrobforgeChart *chart,
                                          const double *t0_re,
                                          const double *t0_im,
                                          const double *t1_re,
                                          const double *t1_im,
                                          size_t n,
                                          double tol,
                                          double *out_re,
                                          double *out_im);

// The Stokes matrix of P^d as JSON.
//
// # Safety
// `out` must be a valid pointer.
enum FrobforgeStatus frobforge_pd_stokes_json(size_t d, char **out);

// Applies a braid word such as `"1,-2,1"` to a Stokes matrix given as JSON.
//
// # Safety
// `s_json` and `word` must be nul-terminated strings, `out` a valid pointer.
enum FrobforgeStatus frobforge_braid_json(const char *s_json, const char *word, char **out);

// Runs one acceptance criterion (1 to 13). `passed` receives 1 or 0;
// `detail` may be null.
//
// # Safety
// `passed` must be a valid pointer.
enum FrobforgeStatus frobforge_selftest(uint32_t id, uint64_t seed, int *passed, char **detail);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FROBFORGE_H */
