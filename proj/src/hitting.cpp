#include "hitting.hpp"

#include <boost/math/special_functions/binomial.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <sstream>

namespace pkpz {

double HittingLaw::survival(long long g) const {
  long long i = g - dp.surv_lo;
  if (i < 0 || i >= (long long)dp.surv.size()) return 0;
  return dp.surv[i];
}

double HittingLaw::hit_mass() const {
  double s = 0;
  for (auto& row : dp.hit)
    for (double p : row) s += p;
  return s;
}

double HittingLaw::total_mass() const {
  double s = hit_mass() + dp.lumped;
  for (double p : dp.surv) s += p;
  return s;
}

HittingLaw hitting_law(const InitialConfig& Y, long long x0, int horizon, double tol) {
  if (horizon < 1) throw Error(Err::InvalidArgument, "horizon must be >= 1");
  if (!(tol > 0)) throw Error(Err::InvalidArgument, "tol must be > 0");
  double rho = Y.p.rho;
  // window spanned by the exact DP: everything above y_horizon
  long long width = Y.y_ext(1) - Y.y_ext(horizon) + 1;
  if (width > 50'000'000) throw Error(Err::WindowOverflow, "hitting window too large");
  HittingLaw h;
  h.x0 = x0;
  h.horizon = horizon;
  h.dp = hit_dp<double, double>(Y, x0, std::vector<double>{1.0}, horizon, rho / (1 - rho), 1 - rho);
  return h;
}

namespace {

void check_ch_domain(const InitialConfig& Y, cplx v, cplx u) {
  double rho = Y.p.rho;
  if (!(std::abs(u + 1.0) > 0 && std::abs(u + 1.0) < 1 - rho))
    throw Error(Err::DomainViolation, "ch needs 0 < |u+1| < 1-rho");
  if (!(std::abs(u + 1.0) < std::abs(v + 1.0))) throw Error(Err::DomainViolation, "ch needs |u+1| < |v+1|");
}

// psi(k,a) = (1-rho)^a (1+v)^(-a-1) c^k, c = -v(1-rho)/((1+v) rho)
struct Psi {
  cplx base, c, inv1v;
  Psi(cplx v, double rho) {
    base = (1 - rho) / (1.0 + v);
    c = -v * (1 - rho) / ((1.0 + v) * rho);
    inv1v = 1.0 / (1.0 + v);
  }
  // sum over a table of hits
  template <class Tab>
  cplx contract(const Tab& H, int k0) const {
    cplx tot = 0, ck = ipow(c, k0);
    for (int k = k0; k < int(H.hit.size()); ++k, ck *= c) {
      if (H.hit[k].empty()) continue;
      cplx wa = ipow(base, H.hit_lo[k]);
      cplx s = 0;
      for (auto h : H.hit[k]) {
        s += h * wa;
        wa *= base;
      }
      tot += s * ck;
    }
    return tot * inv1v;
  }
};

}  // namespace

cvec ch_multi(const InitialConfig& Y, const cvec& vs, cplx u) {
  for (auto v : vs) check_ch_domain(Y, v, u);
  double rho = Y.p.rho;
  int N = Y.p.N;
  long long y1 = Y.y[0], lo = Y.y[N - 1] + N;
  cplx r = (1.0 + u) / (1 - rho);
  cvec out(vs.size());
  HitDP<cplx, double> dp;
  bool have = lo <= y1;
  if (have) {
    cvec mu(y1 - lo + 1);
    for (long long x = lo; x <= y1; ++x) mu[x - lo] = ipow(r, x);
    dp = hit_dp<cplx, double>(Y, lo, mu, N, rho / (1 - rho), 1 - rho);
  }
  for (size_t i = 0; i < vs.size(); ++i) {
    cplx v = vs[i];
    cplx val = ipow((1.0 + u) / (1.0 + v), y1 + 1) / (v - u);
    if (have) val += Psi(v, rho).contract(dp, 1);
    out[i] = val;
  }
  return out;
}

cplx ch(const InitialConfig& Y, cplx v, cplx u) { return ch_multi(Y, {v}, u)[0]; }

PeriodHits periodic_hits(const InitialConfig& Y, long long lo, const cvec& mu, int periods, long long window_below) {
  int N = Y.p.N;
  long long L = Y.p.L;
  double rho = Y.p.rho, A = rho / (1 - rho), kap = 1 - rho;
  PeriodHits out;
  out.lo.assign(periods + 1, std::vector<long long>(N, 0));
  out.w.assign(periods + 1, std::vector<cvec>(N));
  cvec cur = mu;
  long long hi = lo + (long long)cur.size() - 1;
  for (int j = 1; j <= periods; ++j) {
    for (int k = 0; k < N; ++k) {
      long long bnd = Y.y_ext(k + 1);
      long long cut = bnd - window_below;
      // drop deep states
      if (lo < cut) {
        long long n = std::min<long long>(cut - lo, cur.size());
        for (long long i = 0; i < n; ++i) out.dropped += std::abs(cur[i]);
        cur.erase(cur.begin(), cur.begin() + n);
        lo += n;
      }
      // hits at this time
      if (hi > bnd && !cur.empty()) {
        long long a0 = std::max(lo, bnd + 1);
        out.lo[j][k] = a0;
        out.w[j][k].assign(cur.begin() + (a0 - lo), cur.end());
        cur.resize(std::max<long long>(0, bnd - lo + 1));
        hi = lo + (long long)cur.size() - 1;
      }
      if (cur.empty()) return out;
      // one step, new range [lo-1? no: lo stays, states below lo come from mass flowing down]
      // the measure spreads downward; extend the window down to the cut of the next time
      long long nbnd = Y.y_ext(k + 2);
      long long ncut = nbnd - window_below;
      long long nlo = std::min(lo, ncut);
      long long nhi = hi - 1;
      cvec nw(std::max<long long>(0, nhi - nlo + 1), 0.0);
      cplx S = 0;
      for (long long b = hi - 1; b >= nlo; --b) {
        cplx phi = (b + 1 >= lo && b + 1 <= hi) ? cur[b + 1 - lo] : cplx(0);
        S = kap * (phi + S);
        nw[b - nlo] = A * S;
      }
      // mass below nlo is dropped
      out.dropped += std::abs(A * S / (1 - kap)) * kap;
      cur.swap(nw);
      lo = nlo;
      hi = nhi;
      if (k == N - 1) {
        lo += L;
        hi += L;
      }
    }
  }
  return out;
}

cvec pch_core_multi(const InitialConfig& Y, const cvec& vs, cplx u, const PchHitOptions& o, PchHitInfo* info) {
  int N = Y.p.N;
  long long L = Y.p.L;
  double rho = Y.p.rho, r0 = Y.p.r0, A = rho / (1 - rho), kap = 1 - rho;
  if (!(std::real(u) < -rho) || std::abs(u + 1.0) == 0)
    throw Error(Err::DomainViolation, "u must lie in the left region, u != -1");
  auto lev = [&](cplx w) { return std::pow(std::abs(w), rho) * std::pow(std::abs(w + 1.0), 1 - rho); };
  if (!(lev(u) < r0)) throw Error(Err::DomainViolation, "u outside the left lobe");
  double zmax = 0, qmax = 0;
  std::vector<cplx> zzv;
  for (auto v : vs) {
    if (!(std::real(v) > -rho) || !(lev(v) < r0)) throw Error(Err::DomainViolation, "v outside the right lobe");
    check_ch_domain(Y, v, u);
    cplx zzv_ = std::exp(double(N) * std::log(v) + double(L - N) * std::log(v + 1.0) - double(L) * std::log(r0));
    if (N % 2) zzv_ = -zzv_;
    zzv.push_back(zzv_);
    zmax = std::max(zmax, std::abs(zzv_));
    qmax = std::max(qmax, std::abs(1.0 + u) / std::abs(1.0 + v));
  }
  if (!(zmax < 1)) throw Error(Err::TailBoundFailure, "|zz| >= 1");
  double tol = o.tol;
  int K = int(std::ceil(std::log(tol) / std::log(std::max(zmax, 1e-300)))) + o.extra_periods;
  K = std::max(K, 1);
  long long Wtol = (long long)std::ceil(std::log(tol) / std::log(1 - rho));
  double var = (1 - rho) / (rho * rho);
  long long Wbelow = Wtol + (long long)std::ceil(6 * std::sqrt(var * double(K) * N));
  long long y1 = Y.y[0], yN = Y.y[N - 1];
  long long Xmax = y1 + (long long)std::ceil(std::log(tol) / std::log(qmax)) + 1;
  if (Xmax - y1 > 10'000'000 || Wbelow > 10'000'000) throw Error(Err::WindowOverflow, "pch window too large");
  cplx r = (1.0 + u) / (1 - rho);

  // period 0: unhit U on (yN, y1], post P on [y_{N+1} - Wbelow, Xmax]
  long long x_lo = yN + N;
  long long plo = (y1 - L) - Wbelow;
  long long phi_ = Xmax;
  cvec P(phi_ - plo + 1, 0.0);
  for (long long x = std::max(y1 + 1, x_lo); x <= Xmax; ++x) P[x - plo] = ipow(r, x);
  HitDP<cplx, double> H0;
  H0.hit_lo.assign(N, 0);
  H0.hit.assign(N, {});
  long long ulo = yN + 1, uhi = y1;
  cvec U;
  if (x_lo <= y1) {
    U.assign(uhi - ulo + 1, 0.0);
    for (long long x = x_lo; x <= y1; ++x) U[x - ulo] = ipow(r, x);
  } else {
    uhi = ulo - 1;
  }
  double dropped = 0;
  for (int m = 0; m < N; ++m) {
    // step P (free walk) from time m to m+1, window floor stays at plo
    {
      cvec nP(P.size(), 0.0);
      cplx S = 0;
      for (long long b = phi_ - 1; b >= plo; --b) {
        S = kap * (P[b + 1 - plo] + S);
        nP[b - plo] = A * S;
      }
      dropped += std::abs(A * S / (1 - kap)) * kap;
      P.swap(nP);
    }
    if (m == N - 1) break;
    // step U, hits at time m+1 go to H0 and to P
    if (uhi >= ulo) {
      long long bnd = Y.y_ext(m + 2);
      cvec nU(uhi - ulo + 1, 0.0);
      cplx S = 0;
      for (long long b = uhi - 1; b >= ulo; --b) {
        S = kap * (U[b + 1 - ulo] + S);
        nU[b - ulo] = A * S;
      }
      long long nhi = uhi - 1;
      if (nhi > bnd) {
        long long a0 = std::max(ulo, bnd + 1);
        H0.hit_lo[m + 1] = a0;
        for (long long a = a0; a <= nhi; ++a) {
          H0.hit[m + 1].push_back(nU[a - ulo]);
          P[a - plo] += nU[a - ulo];
        }
      }
      long long shi = std::min(nhi, bnd);
      nU.resize(std::max<long long>(0, shi - ulo + 1));
      U.swap(nU);
      uhi = shi;
    }
  }
  // P now holds the post-tau walkers at time N; shift by +L
  PeriodHits PH = periodic_hits(Y, plo + L, P, K, Wbelow);
  dropped += PH.dropped;
  if (info) {
    info->periods = K;
    info->dropped_mass = dropped;
  }
  cvec out(vs.size());
  for (size_t i = 0; i < vs.size(); ++i) {
    cplx v = vs[i];
    Psi psi(v, rho);
    cplx chv = ipow((1.0 + u) / (1.0 + v), y1 + 1) / (v - u) + psi.contract(H0, 1);
    cplx T = 0, zj = 1.0;
    for (int j = 1; j <= K; ++j) {
      zj *= zzv[i];
      HitDP<cplx, double> tab;
      tab.hit_lo = PH.lo[j];
      tab.hit = PH.w[j];
      T += zj * psi.contract(tab, 0);
    }
    out[i] = chv - T;
  }
  return out;
}

cvec pch_hitting_multi(const InitialConfig& Y, const BetheSpectrum& s, const cvec& vs, cplx u,
                       const PchHitOptions& o, PchHitInfo* info) {
  cvec out = pch_core_multi(Y, vs, u, o, info);
  int N = Y.p.N, L = Y.p.L;
  auto qu = q_partition(s, u);
  for (size_t i = 0; i < vs.size(); ++i) {
    auto q = q_partition(s, vs[i]);
    out[i] *= ipow(u, N) * ipow(vs[i] + 1.0, L - N) / (q.left * qu.right);
  }
  return out;
}

cplx pch_hitting(const InitialConfig& Y, const BetheSpectrum& s, cplx v, cplx u, const PchHitOptions& o) {
  return pch_hitting_multi(Y, s, {v}, u, o)[0];
}

MartingaleResult martingale_check(const InitialConfig& Y, int i, long long x) {
  if (i < 1 || i > Y.p.N) throw Error(Err::InvalidArgument, "need 1 <= i <= N");
  double rho = Y.p.rho;
  long long yi = Y.y[i - 1];
  auto dp = hit_dp<double, double>(Y, x, std::vector<double>{1.0}, i, rho / (1 - rho), 1 - rho);
  MartingaleResult r;
  for (int k = 0; k < i; ++k)
    for (size_t j = 0; j < dp.hit[k].size(); ++j) {
      long long a = dp.hit_lo[k] + (long long)j;
      long long n = a - yi - 1, kk = i - k - 1;
      double b = n < kk ? 0.0 : boost::math::binomial_coefficient<double>(unsigned(n), unsigned(kk));
      r.lhs += -b * std::pow(1 - rho, double(a - x)) * std::pow((1 - rho) / rho, k) * dp.hit[k][j];
    }
  if (x >= yi + i) r.rhs = -boost::math::binomial_coefficient<double>(unsigned(x - yi - 1), unsigned(i - 1));
  return r;
}

bool martingale_check_exact(const InitialConfig& Y, int i, long long x, std::string* detail) {
  using Q = boost::multiprecision::cpp_rational;
  using Z = boost::multiprecision::cpp_int;
  if (i < 1 || i > Y.p.N) throw Error(Err::InvalidArgument, "need 1 <= i <= N");
  Q rho(Z(Y.p.N), Z(Y.p.L));
  Q one(1);
  long long yi = Y.y[i - 1];
  auto dp = hit_dp<Q, Q>(Y, x, std::vector<Q>{Q(1)}, i, Q(rho / (one - rho)), Q(one - rho));
  auto binom = [](long long n, long long k) {
    Z b = 1;
    for (long long t = 1; t <= k; ++t) b = b * (n - k + t) / t;
    return b;
  };
  auto qpow = [](Q b, long long e) {
    Q r(1);
    if (e < 0) {
      b = Q(1) / b;
      e = -e;
    }
    while (e--) r *= b;
    return r;
  };
  Q lhs(0), rhs(0);
  for (int k = 0; k < i; ++k)
    for (size_t j = 0; j < dp.hit[k].size(); ++j) {
      long long a = dp.hit_lo[k] + (long long)j;
      lhs -= Q(binom(a - yi - 1, i - k - 1)) * qpow(one - rho, a - x) * qpow((one - rho) / rho, k) * dp.hit[k][j];
    }
  if (x >= yi + i) rhs = -Q(binom(x - yi - 1, i - 1));
  if (detail) {
    std::ostringstream os;
    os << "lhs=" << lhs << " rhs=" << rhs;
    *detail = os.str();
  }
  return lhs == rhs;
}

}  // namespace pkpz
