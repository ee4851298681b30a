#pragma once
#include "common.hpp"

namespace pkpz {

struct BetheSpectrum {
  RingParams p;
  cplx z;     // one representative with z^L = zL
  cplx zL;    // z^L, the only thing the roots depend on (underflows for large L)
  cplx logzL; // log z^L, any branch
  cvec roots; // all L roots
  cvec left;  // Re w < -rho, L-N of them
  cvec right; // Re w > -rho, N of them
};

struct BetheOptions {
  double margin = 0.02;  // refuse |z| > (1-margin) r0
};

BetheSpectrum solve_bethe(const RingParams& p, cplx z, const BetheOptions& opt = {});
// same, parametrized by z^L directly
BetheSpectrum solve_bethe_zL(const RingParams& p, cplx zL, const BetheOptions& opt = {});
// rotated variable zz = (-1)^N z^L / r0^L
// from log z^L, for rings where z^L underflows
BetheSpectrum solve_bethe_logzL(const RingParams& p, cplx logzL, const BetheOptions& opt = {});
BetheSpectrum solve_bethe_zz(const RingParams& p, cplx zz, const BetheOptions& opt = {});
cplx zz_of(const BetheSpectrum& s);

struct QPair {
  cplx left, right;
};
QPair q_partition(const BetheSpectrum& s, cplx w);

// q_z(w) = w^N (w+1)^(L-N) - z^L
cplx q_full(const RingParams& p, cplx zL, cplx w);
// q_z'(w) at a root w, using w^N (w+1)^(L-N) = z^L
cplx q_full_deriv_at_root(const BetheSpectrum& s, cplx w);
// q_R'(right[i]) = prod_{j != i} (v_i - v_j)
cplx q_right_deriv(const BetheSpectrum& s, int i);
cplx q_left_deriv(const BetheSpectrum& s, int i);

// log of prod (-u)^N over left roots and of prod (v+1)^(L-N) over right roots (mod 2 pi i)
cplx log_prod_left(const BetheSpectrum& s, double power);
cplx log_prod_right_p1(const BetheSpectrum& s, double power);
// log Delta(W;W') = sum log (w - w')
cplx log_delta2(const cvec& W, const cvec& Wp);

struct RootIdentityReport {
  double dev_deriv = 0;   // prod q_R'(v) vs (-1)^{N(N-1)/2} Delta(R)^2
  double dev_cross = 0;   // prod q_L(v) vs Delta(R;L)
  double dev_product = 0; // prod (-u)^N vs prod (v+1)^(L-N)
  double dev_vieta = 0;   // prod roots vs (-1)^(L+1) z^L
  double dev_qprime = 0;  // q'(v)/(q(v)+z^L) vs L(v+rho)/(v(v+1))
  double max_dev() const;
};
RootIdentityReport root_identities(const BetheSpectrum& s, double tol = 1e-8);

double max_residual(const BetheSpectrum& s);

}  // namespace pkpz
