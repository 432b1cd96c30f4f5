#ifndef RADON_EDGE_H
#define RADON_EDGE_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status returned by every fallible call.
 */
typedef enum ReStatus {
  RE_STATUS_OK = 0,
  RE_STATUS_NULL_POINTER = 1,
  RE_STATUS_INPUT = 2,
  RE_STATUS_GEOMETRY = 3,
  RE_STATUS_NUMERIC = 4,
  RE_STATUS_RANGE = 5,
  RE_STATUS_CHART = 6,
  RE_STATUS_CONFIG = 7,
  RE_STATUS_FORMAT = 8,
  RE_STATUS_IO = 9,
  RE_STATUS_PANIC = 10,
} ReStatus;

typedef struct ReGrid ReGrid;

typedef struct ReKernel ReKernel;

typedef struct RePhantom RePhantom;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message, NUL terminated and
 * truncated to `len` bytes. Returns the full message length.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t re_last_error_message(char *buf, size_t len);

/**
 * Builds the interpolation kernel. Release with `re_kernel_free`.
 */
struct ReKernel *re_kernel_new(void);

/**
 * # Safety
 * `k` must be null or come from `re_kernel_new`, and not be freed twice.
 */
void re_kernel_free(struct ReKernel *k);

/**
 * `m`-th derivative of the kernel at `t`, `m <= 3`.
 *
 * # Safety
 * `k` must be a live kernel handle and `out` a writable double.
 */
enum ReStatus re_kernel_eval(const struct ReKernel *k, double t, uint32_t m, double *out);

/**
 * `int_h^inf phi`.
 *
 * # Safety
 * `k` must be a live kernel handle and `out` a writable double.
 */
enum ReStatus re_kernel_tail_integral(const struct ReKernel *k, double h, double *out);

/**
 * Predicted edge value `f0 - f_delta * int_h^inf phi`.
 *
 * # Safety
 * `k` must be a live kernel handle and `out` a writable double.
 */
enum ReStatus re_predicted_response(const struct ReKernel *k,
                                    double f0,
                                    double f_delta,
                                    double h,
                                    double *out);

/**
 * Phantom from `n_balls` records `cx, cy, cz, radius, density`.
 *
 * # Safety
 * `balls` must point to `5 * n_balls` doubles; `out` to a writable pointer.
 */
enum ReStatus re_phantom_new(const double *balls, size_t n_balls, struct RePhantom **out);

/**
 * # Safety
 * `p` must be null or come from `re_phantom_new`, and not be freed twice.
 */
void re_phantom_free(struct RePhantom *p);

/**
 * Plane integral over `{x : alpha . x = p}`; `alpha` is a unit 3-vector.
 *
 * # Safety
 * `ph` must be a live phantom, `alpha` point to 3 doubles, `out` writable.
 */
enum ReStatus re_phantom_radon(const struct RePhantom *ph,
                               const double *alpha,
                               double p,
                               double *out);

/**
 * Direction grid and affine sampling. Release with `re_grid_free`.
 *
 * # Safety
 * `out` must point to a writable pointer.
 */
enum ReStatus re_grid_new(size_t n_theta,
                          size_t n_gamma,
                          double eps,
                          double rho,
                          double p_min,
                          double p_max,
                          struct ReGrid **out);

/**
 * # Safety
 * `g` must be null or come from `re_grid_new`, and not be freed twice.
 */
void re_grid_free(struct ReGrid *g);

/**
 * Number of grid directions, or 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live grid handle.
 */
size_t re_grid_n_directions(const struct ReGrid *g);

/**
 * Reconstruction at `x` from the phantom's exact data on the grid.
 *
 * # Safety
 * All handles must be live, `x` must point to 3 doubles, `out` writable.
 */
enum ReStatus re_reconstruct_point(const struct RePhantom *ph,
                                   const struct ReKernel *k,
                                   const struct ReGrid *g,
                                   const double *x,
                                   double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RADON_EDGE_H */
