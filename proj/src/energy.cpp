#include "energy.hpp"

namespace pkpz {

namespace {

Eigen::MatrixXcd build_kernel(const InitialConfig& Y, const BetheSpectrum& s, int M, int Mv, const EnergyOptions& o) {
  int N = Y.p.N, L = Y.p.L;
  double rho = Y.p.rho;
  double minv = 1e300;
  for (auto v : s.right) minv = std::min(minv, std::abs(v));
  double rv = std::min(0.3 * minv, 0.3 * rho);
  cvec vn(Mv);
  for (int n = 0; n < Mv; ++n) vn[n] = std::polar(rv, 2 * PI * (n + 0.5) / Mv);

  // u points and their weights
  cvec us, cu;
  if (!o.u_quadrature) {
    for (auto u : s.left) {
      us.push_back(u);
      cu.push_back(s.zL * u * (u + 1.0) / (double(L) * (u + rho)));
    }
  } else {
    double maxl = 0;
    for (auto u : s.left) maxl = std::max(maxl, std::abs(u + 1.0));
    double R = 0.5 * (maxl + (1 - rho));
    for (int m = 0; m < o.Mu; ++m) {
      cplx e = std::polar(R, 2 * PI * (m + 0.5) / o.Mu);
      cplx u = -1.0 + e;
      cplx t = ipow(u, N) * ipow(u + 1.0, L - N);
      us.push_back(u);
      cu.push_back(e / double(o.Mu) * t * s.zL / (t - s.zL));
    }
  }
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(M + 1, Mv);
  for (size_t m = 0; m < us.size(); ++m) {
    cplx u = us[m];
    cvec chs = ch_multi(Y, vn, u);
    cplx p = cu[m];
    for (int i = 0; i <= M; ++i) {
      for (int n = 0; n < Mv; ++n) A(i, n) += p * chs[n];
      p *= (u + 1.0);
    }
  }
  Eigen::MatrixXcd B(Mv, M + 1);
  for (int n = 0; n < Mv; ++n) {
    cplx v = vn[n];
    cplx base = v / double(Mv) * ipow(v + 1.0, -1 - L + N) * ipow(v, -N);
    cplx step = 1.0 / (v + 1.0);
    for (int j = 0; j <= M; ++j) {
      B(n, j) = base;
      base *= step;
    }
  }
  return A * B;
}

}  // namespace

Eigen::MatrixXcd ken_matrix(const InitialConfig& Y, const BetheSpectrum& s, int M, const EnergyOptions& o,
                            int* Mv_used) {
  int Mv = o.Mv;
  Eigen::MatrixXcd K = build_kernel(Y, s, M, Mv, o);
  for (;;) {
    if (2 * Mv > o.Mv_cap) throw Error(Err::QuadratureStall, "v-quadrature did not stabilize");
    Eigen::MatrixXcd K2 = build_kernel(Y, s, M, 2 * Mv, o);
    double diff = (K2 - K).cwiseAbs().maxCoeff();
    // the determinant sees K next to I, so changes are measured on that scale
    double scale = std::max(K2.cwiseAbs().maxCoeff(), 1.0);
    K = K2;
    Mv *= 2;
    if (diff <= o.quad_tol * scale) break;
  }
  if (Mv_used) *Mv_used = Mv;
  return K;
}

cplx ken_entry(const InitialConfig& Y, const BetheSpectrum& s, long long x, long long y, const EnergyOptions& o) {
  if (x > 0 || y > 0) throw Error(Err::InvalidArgument, "x, y must be <= 0");
  int M = int(std::max(-x, -y));
  return ken_matrix(Y, s, M, o)(-x, -y);
}

cplx energy_prefactor(const BetheSpectrum& s) {
  int N = s.p.N, L = s.p.L;
  return std::exp(log_delta2(s.right, s.left) - log_prod_left(s, N) - log_prod_right_p1(s, L - N));
}

EnergyResult energy_fredholm(const InitialConfig& Y, const BetheSpectrum& s, const EnergyOptions& o) {
  if (!Y.labeled()) throw Error(Err::DomainViolation, "energy_fredholm needs a labeled configuration");
  int M = o.M_start > 0 ? o.M_start : int(std::ceil(4 * std::sqrt(double(Y.p.L))));
  EnergyResult r;
  r.prefactor = energy_prefactor(s);
  for (;;) {
    if (2 * M > o.M_cap) throw Error(Err::AdaptivityFailure, "truncation depth cap reached");
    int Mv = 0;
    Eigen::MatrixXcd K = ken_matrix(Y, s, 2 * M, o, &Mv);
    Eigen::MatrixXcd I1 = Eigen::MatrixXcd::Identity(M + 1, M + 1) - K.topLeftCorner(M + 1, M + 1);
    Eigen::MatrixXcd I2 = Eigen::MatrixXcd::Identity(2 * M + 1, 2 * M + 1) - K;
    cplx d1 = I1.partialPivLu().determinant();
    cplx d2 = I2.partialPivLu().determinant();
    r.det_change = std::abs(d1 - d2);
    r.M = 2 * M;
    r.Mv = Mv;
    r.det = d2;
    if (r.det_change <= o.tol * std::max(std::abs(d2), 1e-300)) break;
    M *= 2;
  }
  r.value = r.prefactor * r.det;
  return r;
}

}  // namespace pkpz
