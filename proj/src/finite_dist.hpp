#pragma once
#include <vector>

#include "energy.hpp"

namespace pkpz {

struct ObsPoint {
  long long k = 1;  // particle label
  double t = 0;     // time
  long long a = 0;  // threshold
};

struct QuadConfig {
  std::vector<double> fractions;  // |zz_l|, strictly decreasing; empty -> 0.6 / 0.6,0.4
  int nodes = 64;                 // per circle, doubled until stable
  int nodes_cap = 512;
  int series_cap = 3;             // root-sum series only
  double dp_tol = 1e-13;
  double quad_tol = 1e-10;
  bool literal_measure = false;   // dz/2pi i in z instead of dzz/(2 pi i zz)
  bool fredholm_energy = true;    // det(I-K) rather than the determinant ratio
};

// per-point helpers, i is 1-based; f_i uses the i-1 point (or zeros) as reference
cplx f_fn(const std::vector<ObsPoint>& pts, int i, cplx w, double rho);
cplx J_fn(const RingParams& p, cplx w);
// H_z(w); s == nullptr means z = 0
cplx H_fn(const BetheSpectrum* s, cplx w);
// g_l(w) for w in the roots of specs[l-1]
cplx g_fn(const std::vector<BetheSpectrum>& specs, int l, cplx w);

// det[1/(w_i - w'_j)]
cplx cauchy_det(const cvec& W, const cvec& Wp);
cplx cauchy_closed(const cvec& W, const cvec& Wp);

cplx script_c(const InitialConfig& Y, const std::vector<BetheSpectrum>& specs, const std::vector<ObsPoint>& pts,
              const QuadConfig& cfg = {});

// D^(n) as the full tuple sum (includes the (n_1!...n_m!)^2 multiplicity)
cplx script_d_term(const InitialConfig& Y, const std::vector<BetheSpectrum>& specs, const std::vector<ObsPoint>& pts,
                   const std::vector<int>& n, const QuadConfig& cfg = {});

struct DSeries {
  cplx value;
  double tail = 0;            // 0 when every admissible n was summed
  std::vector<double> level;  // |sum of terms with sum(n) = s| for s = 0,1,...
};
DSeries script_d(const InitialConfig& Y, const std::vector<BetheSpectrum>& specs, const std::vector<ObsPoint>& pts,
                 const QuadConfig& cfg = {});

struct DistResult {
  double prob = 0;
  double imag = 0;
  double series_tail = 0;
  double quad_change = 0;
  int nodes = 0;
  double peak = 0;  // max |integrand| on the circles; rounding puts an absolute floor near 1e-16 * peak
  bool literal_measure = false;
};
DistResult multipoint_prob(const InitialConfig& Y, const std::vector<ObsPoint>& pts, const QuadConfig& cfg = {});

}  // namespace pkpz
