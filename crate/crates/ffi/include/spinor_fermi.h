#ifndef SPINOR_FERMI_H
#define SPINOR_FERMI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define SF_BASIS_WEYL 0

#define SF_BASIS_DIRAC 1

/*
 Result codes.
 */
typedef enum SfStatus {
  SF_STATUS_OK = 0,
  SF_STATUS_NULL_POINTER = 1,
  SF_STATUS_INVALID_ARGUMENT = 2,
  /*
   Off the mass shell, outside a chart, or a non-timelike tangent.
   */
  SF_STATUS_DOMAIN = 3,
  SF_STATUS_NUMERICAL = 4,
  /*
   A Rust panic was caught at the boundary.
   */
  SF_STATUS_INTERNAL = 5,
} SfStatus;

/*
 Opaque spacetime background.
 */
typedef struct SfBackground SfBackground;

/*
 Opaque worldline, parameterized by proper time.
 */
typedef struct SfWorldline SfWorldline;

typedef struct SfComplex {
  double re;
  double im;
} SfComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread, or null. The pointer is
 valid until the next call into this library from the same thread.
 */
const char *sf_last_error_message(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *sf_version(void);

/*
 Flat spacetime in inertial coordinates.

 # Safety
 `out` must be a valid pointer to writable storage for one handle.
 */
enum SfStatus sf_background_new_minkowski(struct SfBackground **out);

/*
 Schwarzschild exterior in isotropic Cartesian coordinates.

 # Safety
 `out` must be a valid pointer to writable storage for one handle.
 */
enum SfStatus sf_background_new_schwarzschild(double mass, struct SfBackground **out);

/*
 Flat spacetime in the Rindler chart with lapse `1 + a·x`.

 # Safety
 `out` must be a valid pointer to writable storage for one handle.
 */
enum SfStatus sf_background_new_rindler(double acceleration, struct SfBackground **out);

/*
 # Safety
 `bg` must be null or a handle from this library not yet freed.
 */
void sf_background_free(struct SfBackground *bg);

/*
 Observer at rest at the chart point `position[3]`.

 # Safety
 `bg` must be a live handle, `position` must point to 3 doubles and `out`
 to writable storage for one handle.
 */
enum SfStatus sf_worldline_new_static(const struct SfBackground *bg,
                                      const double *position,
                                      struct SfWorldline **out);

/*
 Uniform circular orbit of chart radius `radius` and angular velocity
 `omega` in the plane at height `z`.

 # Safety
 `bg` must be a live handle and `out` writable storage for one handle.
 */
enum SfStatus sf_worldline_new_circular(const struct SfBackground *bg,
                                        double radius,
                                        double omega,
                                        double z,
                                        struct SfWorldline **out);

/*
 Uniformly accelerated observer in inertial coordinates of flat spacetime.

 # Safety
 `out` must be writable storage for one handle.
 */
enum SfStatus sf_worldline_new_rindler(double acceleration, struct SfWorldline **out);

/*
 Proper time of one revolution; `InvalidArgument` for non-periodic worldlines.

 # Safety
 `wl` must be a live handle and `out` a valid pointer.
 */
enum SfStatus sf_worldline_proper_period(const struct SfWorldline *wl, double *out);

/*
 # Safety
 `wl` must be null or a handle from this library not yet freed.
 */
void sf_worldline_free(struct SfWorldline *wl);

/*
 Fermi-transports the frame components `x[4]` from `s0` to `s1` with RK4
 steps of at most `h`, writing the result to `out[4]`.

 # Safety
 Handles must be live; `x` and `out` must each point to 4 doubles.
 */
enum SfStatus sf_transport_vector(const struct SfBackground *bg,
                                  const struct SfWorldline *wl,
                                  const double *x,
                                  double s0,
                                  double s1,
                                  double h,
                                  double *out);

/*
 Two-spinor Fermi transport with constant gauge `alpha`; `u` and `out`
 hold 2 components.

 # Safety
 Handles must be live; `u` and `out` must each point to 2 `SfComplex`.
 */
enum SfStatus sf_transport_two_spinor(const struct SfBackground *bg,
                                      const struct SfWorldline *wl,
                                      const struct SfComplex *u,
                                      double s0,
                                      double s1,
                                      double h,
                                      double alpha,
                                      struct SfComplex *out);

/*
 Dirac-spinor Fermi transport with constant gauge `alpha`. `psi` and `out`
 hold 4 components in the basis `basis` (`SF_BASIS_WEYL` or `SF_BASIS_DIRAC`).

 # Safety
 Handles must be live; `psi` and `out` must each point to 4 `SfComplex`.
 */
enum SfStatus sf_transport_four_spinor(const struct SfBackground *bg,
                                       const struct SfWorldline *wl,
                                       const struct SfComplex *psi,
                                       uint32_t basis,
                                       double s0,
                                       double s1,
                                       double h,
                                       double alpha,
                                       struct SfComplex *out);

/*
 The Dirac matrix `γ_λ` (`lambda` in 0..=3) as a row-major 4×4 array.

 # Safety
 `out` must point to 16 `SfComplex`.
 */
enum SfStatus sf_gamma_matrix(uint32_t lambda, uint32_t basis, struct SfComplex *out);

/*
 Dirac frame `(u_1, u_2, v_1, v_2)` adapted to the on-shell covector `p[4]`
 of mass `mass`, obtained by boosting the rest frame of the observer
 `tau[4]`. Columns of the row-major `out[16]` are the frame spinors.

 # Safety
 `p` and `tau` must point to 4 doubles and `out` to 16 `SfComplex`.
 */
enum SfStatus sf_dirac_frame(const double *p,
                             double mass,
                             const double *tau,
                             uint32_t basis,
                             struct SfComplex *out);

/*
 Thomas rotation angle over one circular orbit in flat spacetime, measured
 by transport with `steps` RK4 steps, and its closed form `2π(1 − γ)`.

 # Safety
 `measured` and `expected` must be valid pointers.
 */
enum SfStatus sf_thomas_precession(double radius,
                                   double omega,
                                   uint32_t steps,
                                   double *measured,
                                   double *expected);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPINOR_FERMI_H */
