#ifndef PKPZ_PKPZ_H
#define PKPZ_PKPZ_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define PKPZ_API __declspec(dllexport)
#else
#define PKPZ_API __attribute__((visibility("default")))
#endif

/* status codes; 0 is success */
typedef enum pkpz_Status {
  PKPZ_OK = 0,
  PKPZ_INVALID_ARGUMENT = 1,
  PKPZ_ROOTS_NEAR_CRITICAL = 2,
  PKPZ_CONVERGENCE_FAILURE = 3,
  PKPZ_IDENTITY_VIOLATION = 4,
  PKPZ_SINGULAR_DENOMINATOR = 5,
  PKPZ_DEGENERATE_ENERGY = 6,
  PKPZ_DOMAIN_VIOLATION = 7,
  PKPZ_TAIL_BOUND_FAILURE = 8,
  PKPZ_WINDOW_OVERFLOW = 9,
  PKPZ_QUADRATURE_STALL = 10,
  PKPZ_ADAPTIVITY_FAILURE = 11,
  PKPZ_POLE_AT_RHO = 12,
  PKPZ_SERIES_NOT_CONVERGED = 13,
  PKPZ_CALIBRATION_UNRESOLVED = 14,
  PKPZ_PARITY_VIOLATION = 15,
  PKPZ_ANCHOR_OUTSIDE_SUPPORT = 16,
  PKPZ_ORDERING_VIOLATION = 17,
  PKPZ_IO_ERROR = 18,
  PKPZ_INTERNAL = 99
} pkpz_Status;

/* message of the last failed call on this thread ("" if none) */
PKPZ_API const char* pkpz_last_error(void);
/* status of the last call on this thread; constructors returning NULL set it too */
PKPZ_API int pkpz_last_status(void);
PKPZ_API const char* pkpz_status_name(int status);

/* initial configuration: y_1 > ... > y_N with -(L-N) <= y_j + j <= 0 */
typedef struct pkpz_Config pkpz_Config;
PKPZ_API pkpz_Config* pkpz_Config_new(int L, int N, const long long* y);
PKPZ_API pkpz_Config* pkpz_Config_new_step(int L, int N);
PKPZ_API void pkpz_Config_free(pkpz_Config* c);
PKPZ_API int pkpz_Config_L(const pkpz_Config* c);
PKPZ_API int pkpz_Config_N(const pkpz_Config* c);

/* Bethe roots of w^N (w+1)^(L-N) = z^L; complex arrays are interleaved re, im */
typedef struct pkpz_Spectrum pkpz_Spectrum;
PKPZ_API pkpz_Spectrum* pkpz_Spectrum_new(int L, int N, double z_re, double z_im, double margin);
/* z^L = (-rho)^N (1-rho)^(L-N) zz */
PKPZ_API pkpz_Spectrum* pkpz_Spectrum_new_zz(int L, int N, double zz_re, double zz_im, double margin);
PKPZ_API void pkpz_Spectrum_free(pkpz_Spectrum* s);
/* right: 2N doubles, left: 2(L-N) doubles; either may be NULL */
PKPZ_API int pkpz_Spectrum_roots(const pkpz_Spectrum* s, double* right, double* left);
PKPZ_API int pkpz_Spectrum_z(const pkpz_Spectrum* s, double out[2]);
PKPZ_API int pkpz_Spectrum_max_residual(const pkpz_Spectrum* s, double* out);

/* energy: method 0 = determinant ratio, 1 = Fredholm determinant */
PKPZ_API int pkpz_energy(const pkpz_Config* c, const pkpz_Spectrum* s, int method, double out[2]);
/* pch(v, u) for every right root v, hitting form; out has 2N doubles */
PKPZ_API int pkpz_pch(const pkpz_Config* c, const pkpz_Spectrum* s, double u_re, double u_im, double* out);

typedef struct pkpz_ObsPoint {
  long long k;
  double t;
  long long a;
} pkpz_ObsPoint;

typedef struct pkpz_DistResult {
  double prob;
  double imag;
  double series_tail;
  double quad_change;
  int nodes;
} pkpz_DistResult;

/* zero fields keep the defaults */
typedef struct pkpz_DistOptions {
  int nodes_cap;      /* 0 -> 512 */
  int series_cap;     /* 0 -> 3 */
  double quad_tol;    /* 0 -> 1e-10 */
  int direct_energy;  /* nonzero: determinant ratio instead of det(I - K) */
} pkpz_DistOptions;

/* P(x_{k_i}(t_i) >= a_i for all i) by the nested contour formula; opt may be NULL */
PKPZ_API int pkpz_prob(const pkpz_Config* c, const pkpz_ObsPoint* pts, int m, const pkpz_DistOptions* opt,
                       pkpz_DistResult* out);
/* Monte Carlo estimate; trials >= 1 */
PKPZ_API int pkpz_mc(const pkpz_Config* c, const pkpz_ObsPoint* pts, int m, long long trials, uint64_t seed,
                     double* estimate, double* stderr_out);

/* 1-periodic limit profiles */
typedef struct pkpz_Profile pkpz_Profile;
PKPZ_API pkpz_Profile* pkpz_Profile_new_flat(double value);
PKPZ_API pkpz_Profile* pkpz_Profile_new_wedge(double floor_depth);
/* breakpoints alpha in [0,1), linear in between, periodic */
PKPZ_API pkpz_Profile* pkpz_Profile_new_piecewise(const double* alpha, const double* h, int n);
PKPZ_API void pkpz_Profile_free(pkpz_Profile* p);

typedef struct pkpz_LimitPoint {
  double alpha;
  double tau;
  double beta;
} pkpz_LimitPoint;

typedef struct pkpz_LimitOptions {
  int n_steps;      /* even; 0 -> 400 */
  double quad_tol;  /* 0 -> 1e-6 */
  int nodes_cap;    /* 0 -> 256 */
  int series_cap;   /* 0 -> 3 */
} pkpz_LimitOptions;

typedef struct pkpz_LimitResult {
  double value;
  double imag;
  double quad_change;
  int nodes;
} pkpz_LimitResult;

PKPZ_API int pkpz_limit_F(const pkpz_Profile* p, const pkpz_LimitPoint* pts, int m, const pkpz_LimitOptions* opt,
                          pkpz_LimitResult* out);

/* acceptance criterion 1..13; detail gets a one-line summary */
PKPZ_API int pkpz_criterion(int id, int quick, int* pass, char* detail, size_t detail_cap, double* seconds);
PKPZ_API const char* pkpz_criterion_name(int id);

#ifdef __cplusplus
}
#endif

#endif
