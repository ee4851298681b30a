#pragma once
#include <functional>
#include <vector>

#include "symmetric.hpp"

namespace pkpz {

// One-step map of the strictly decreasing walk on a weighted measure:
//   new(b) = A * sum_{g > b} kappa^(g-b) phi(g)
// With A = rho/(1-rho), kappa = 1-rho this is the geometric walk transition.
//
// hit_dp runs the walk from an initial measure mu on [x_lo, x_lo+mu.size()) for
// steps m = 0..horizon-1 with hitting rule G_m > y_{m+1}. States at or below
// y_horizon can never hit before the horizon and are lumped exactly.
template <class T, class R>
struct HitDP {
  std::vector<long long> hit_lo;     // per k
  std::vector<std::vector<T>> hit;   // per k, index a - hit_lo[k]
  long long surv_lo = 0;             // survivors at time horizon-1
  std::vector<T> surv;
  T lumped{};

  T at(int k, long long a) const {
    if (k < 0 || k >= int(hit.size())) return T{};
    long long i = a - hit_lo[k];
    if (i < 0 || i >= (long long)hit[k].size()) return T{};
    return hit[k][i];
  }
};

template <class T, class R>
HitDP<T, R> hit_dp(const InitialConfig& Y, long long x_lo, const std::vector<T>& mu, int horizon,
                   const R& A, const R& kappa) {
  HitDP<T, R> out;
  out.hit_lo.assign(horizon, 0);
  out.hit.assign(horizon, {});
  out.lumped = T{};
  long long floor_lvl = Y.y_ext(horizon);
  long long x_hi = x_lo + (long long)mu.size() - 1;
  // time 0
  long long y1 = Y.y_ext(1);
  if (x_hi > y1) {
    long long a0 = std::max(x_lo, y1 + 1);
    out.hit_lo[0] = a0;
    for (long long a = a0; a <= x_hi; ++a) out.hit[0].push_back(mu[a - x_lo]);
  }
  long long lo = floor_lvl + 1, hi = std::min(x_hi, y1);
  std::vector<T> cur;
  if (hi >= lo) cur.assign(hi - lo + 1, T{});
  for (long long x = x_lo; x <= std::min(x_hi, y1); ++x) {
    if (x >= lo)
      cur[x - lo] = mu[x - x_lo];
    else
      out.lumped += mu[x - x_lo];
  }
  if (hi < lo) hi = lo - 1;
  for (int m = 0; m + 1 < horizon; ++m) {
    long long bnd = Y.y_ext(m + 2);
    long long nhi = hi - 1;
    std::vector<T> nw;
    if (nhi >= lo) nw.assign(nhi - lo + 1, T{});
    T S{};
    // S(b) = kappa (phi(b+1) + S(b+1)), b from hi-1 down to floor_lvl
    for (long long b = hi - 1; b >= lo - 1; --b) {
      T phi = (b + 1 >= lo && b + 1 <= hi) ? cur[b + 1 - lo] : T{};
      S = T(kappa) * (phi + S);
      if (b >= lo) nw[b - lo] = T(A) * S;
    }
    if (hi >= lo) out.lumped += T(A) * S / T(R(1) - kappa);
    // split into hits and survivors
    long long shi = std::min(nhi, bnd);
    if (nhi > bnd) {
      long long a0 = std::max(lo, bnd + 1);
      out.hit_lo[m + 1] = a0;
      for (long long a = a0; a <= nhi; ++a) out.hit[m + 1].push_back(nw[a - lo]);
    }
    std::vector<T> ncur;
    if (shi >= lo) ncur.assign(nw.begin(), nw.begin() + (shi - lo + 1));
    cur.swap(ncur);
    hi = shi >= lo ? shi : lo - 1;
  }
  out.surv_lo = lo;
  out.surv = cur;
  return out;
}

struct HittingLaw {
  long long x0 = 0;
  int horizon = 0;
  HitDP<double, double> dp;
  double prob(int k, long long a) const { return dp.at(k, a); }
  double survival(long long g) const;
  double hit_mass() const;
  double total_mass() const;  // hits + survivors + lumped survivors
};

HittingLaw hitting_law(const InitialConfig& Y, long long x0, int horizon, double tol = 1e-14);

// ch_Y(v,u) for a list of v sharing one u
cvec ch_multi(const InitialConfig& Y, const cvec& vs, cplx u);
cplx ch(const InitialConfig& Y, cplx v, cplx u);

struct PchHitOptions {
  double tol = 1e-13;
  int extra_periods = 0;
};
struct PchHitInfo {
  int periods = 0;
  double dropped_mass = 0;
};
// pch via the (tau, tau*) expectation, for all vs sharing u
// core = ch - periodic part; pch = u^N (v+1)^(L-N) / (q_L(v) q_R(u)) * core, and only the prefactor sees z
cvec pch_core_multi(const InitialConfig& Y, const cvec& vs, cplx u, const PchHitOptions& o = {},
                    PchHitInfo* info = nullptr);
cvec pch_hitting_multi(const InitialConfig& Y, const BetheSpectrum& s, const cvec& vs, cplx u,
                       const PchHitOptions& o = {}, PchHitInfo* info = nullptr);
cplx pch_hitting(const InitialConfig& Y, const BetheSpectrum& s, cplx v, cplx u, const PchHitOptions& o = {});

// periodic continuation of the walk after time N: general engine shared with the limit module.
// Input: measure at time N in coordinates shifted by +L (post-tau walkers), on [lo, lo+size).
// Output: per period j>=1, the hit table H_j[k][a'] in shifted coordinates of period j.
struct PeriodHits {
  std::vector<std::vector<long long>> lo;        // [j][k]
  std::vector<std::vector<cvec>> w;              // [j][k][a - lo]
  double dropped = 0;
};
PeriodHits periodic_hits(const InitialConfig& Y, long long lo, const cvec& mu, int periods, long long window_below);

struct MartingaleResult {
  double lhs = 0, rhs = 0;
};
MartingaleResult martingale_check(const InitialConfig& Y, int i, long long x);
// exact rational evaluation, returns lhs == rhs
bool martingale_check_exact(const InitialConfig& Y, int i, long long x, std::string* detail = nullptr);

}  // namespace pkpz
