#include "bethe.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <numeric>

namespace pkpz {

namespace {

// roots of w^p (w+1)^(q-p) = c
struct Piece {
  int p, q;
  cplx c;
  cplx s(cplx w) const { return ipow(w, p) * ipow(w + 1.0, q - p) / c; }
  // Newton quotient P/P' with P = w^p (w+1)^(q-p) - c
  cplx newton(cplx w) const {
    cplx t = s(w);
    return (t - 1.0) / (t * (double(p) / w + double(q - p) / (w + 1.0)));
  }
};

cvec companion_seeds(const Piece& pc) {
  // coefficients of w^p (w+1)^(q-p) - c, degree q, monic
  int q = pc.q, p = pc.p;
  std::vector<double> binom(q - p + 1);
  binom[0] = 1;
  for (int j = 1; j <= q - p; ++j) binom[j] = binom[j - 1] * (q - p - j + 1) / j;
  // a[k] coefficient of w^k
  cvec a(q + 1, 0.0);
  for (int j = 0; j <= q - p; ++j) a[p + j] = binom[j];
  a[0] -= pc.c;
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(q, q);
  for (int i = 1; i < q; ++i) C(i, i - 1) = 1.0;
  for (int i = 0; i < q; ++i) C(i, q - 1) = -a[i];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
  cvec out(q);
  for (int i = 0; i < q; ++i) out[i] = es.eigenvalues()(i);
  return out;
}

// point on the level curve |w|^rho |w+1|^(1-rho) = m along the ray center + r e^{i phi}
cplx level_point(cplx center, double phi, double rho, double logm, double r_guess) {
  cplx dir = std::polar(1.0, phi);
  double r = r_guess;
  for (int it = 0; it < 60; ++it) {
    cplx w = center + r * dir;
    double f = rho * std::log(std::abs(w)) + (1 - rho) * std::log(std::abs(w + 1.0)) - logm;
    // d/dr log|w| = Re(dir / w)
    double df = rho * std::real(dir / w) + (1 - rho) * std::real(dir / (w + 1.0));
    if (df == 0) break;
    double step = f / df;
    double rn = r - step;
    if (rn <= 0) rn = r / 2;
    if (std::abs(rn - r) < 1e-15 * std::max(1.0, r)) {
      r = rn;
      break;
    }
    r = rn;
  }
  return center + r * dir;
}

cvec level_seeds(const Piece& pc) {
  int p = pc.p, q = pc.q;
  double rho = double(p) / q;
  double logm = std::log(std::abs(pc.c)) / q;
  double argc = std::arg(pc.c);
  cvec out;
  out.reserve(q);
  double rR = std::pow(std::abs(pc.c), 1.0 / p);
  for (int j = 0; j < p; ++j) {
    double phi = (argc + 2 * PI * j) / p;
    out.push_back(level_point(0.0, phi, rho, logm, std::min(rR, rho)));
  }
  double rL = std::pow(std::abs(pc.c), 1.0 / (q - p));
  for (int j = 0; j < q - p; ++j) {
    double phi = (argc - p * PI + 2 * PI * j) / (q - p);
    out.push_back(level_point(-1.0, phi, rho, logm, std::min(rL, 1 - rho)));
  }
  return out;
}

// simultaneous Aberth-Ehrlich refinement
void aberth(const Piece& pc, cvec& w, int max_it = 500) {
  int n = int(w.size());
  for (int it = 0; it < max_it; ++it) {
    double maxstep = 0;
    for (int i = 0; i < n; ++i) {
      cplx nq = pc.newton(w[i]);
      cplx sum = 0;
      for (int j = 0; j < n; ++j)
        if (j != i) sum += 1.0 / (w[i] - w[j]);
      cplx d = nq / (1.0 - nq * sum);
      w[i] -= d;
      maxstep = std::max(maxstep, std::abs(d) / std::max(1.0, std::abs(w[i])));
    }
    if (maxstep < 1e-15) return;
  }
}

}  // namespace

BetheSpectrum solve_bethe(const RingParams& p, cplx z, const BetheOptions& opt) {
  if (std::abs(z) >= p.r0 * (1 - opt.margin))
    throw Error(Err::DomainViolation, "|z| too close to r0");
  if (std::abs(z) == 0) throw Error(Err::DomainViolation, "z = 0");
  BetheSpectrum s = solve_bethe_zL(p, ipow(z, p.L), opt);
  s.z = z;
  return s;
}

BetheSpectrum solve_bethe_zz(const RingParams& p, cplx zz, const BetheOptions& opt) {
  // z^L = (-1)^N r0^L zz; keep it in log form for large L
  cplx logzL = std::log(zz) + double(p.L) * std::log(p.r0) + (p.N % 2 ? cplx(0, PI) : 0.0);
  return solve_bethe_logzL(p, logzL, opt);
}

cplx zz_of(const BetheSpectrum& s) {
  return std::exp(s.logzL - double(s.p.L) * std::log(s.p.r0) - (s.p.N % 2 ? cplx(0, PI) : 0.0));
}

BetheSpectrum solve_bethe_zL(const RingParams& p, cplx zL, const BetheOptions& opt) {
  if (std::abs(zL) == 0) throw Error(Err::DomainViolation, "z = 0");
  return solve_bethe_logzL(p, std::log(zL), opt);
}

BetheSpectrum solve_bethe_logzL(const RingParams& p, cplx logzL, const BetheOptions& opt) {
  int L = p.L, N = p.N;
  if (!std::isfinite(logzL.real())) throw Error(Err::DomainViolation, "z = 0");
  cplx zL = std::exp(logzL);
  double absz = std::exp(logzL.real() / L);
  if (absz >= p.r0 * (1 - opt.margin))
    throw Error(Err::DomainViolation, "|z| too close to r0");
  BetheSpectrum s;
  s.p = p;
  s.zL = zL;
  s.logzL = logzL;
  s.z = std::polar(absz, logzL.imag() / L);
  int g = std::gcd(N, L);
  Piece pc;
  pc.p = N / g;
  pc.q = L / g;
  double absc = std::exp(logzL.real() / g);
  for (int k = 0; k < g; ++k) {
    pc.c = std::polar(absc, (logzL.imag() + 2 * PI * k) / g);
    cvec w = pc.q <= 40 ? companion_seeds(pc) : level_seeds(pc);
    aberth(pc, w);
    for (auto x : w) s.roots.push_back(x);
  }
  // final Newton on the full equation, in log form relative to each piece
  for (auto& w : s.roots) {
    for (int it = 0; it < 3; ++it) {
      cplx t = std::exp(double(N) * std::log(w) + double(L - N) * std::log(w + 1.0) - logzL);
      cplx d = (t - 1.0) / (t * (double(N) / w + double(L - N) / (w + 1.0)));
      w -= d;
      if (std::abs(d) < 1e-17) break;
    }
  }
  for (auto w : s.roots) {
    double gap = std::real(w) + p.rho;
    if (std::abs(gap) < 1e-8) throw Error(Err::RootsNearCritical, "root on Re w = -rho");
    (gap < 0 ? s.left : s.right).push_back(w);
  }
  if (int(s.left.size()) != L - N || int(s.right.size()) != N)
    throw Error(Err::ConvergenceFailure, "wrong left/right root counts");
  auto key = [](cplx a, cplx b) {
    return std::arg(a) < std::arg(b);
  };
  std::sort(s.right.begin(), s.right.end(), key);
  std::sort(s.left.begin(), s.left.end(), [](cplx a, cplx b) { return std::arg(a + 1.0) < std::arg(b + 1.0); });
  double res = max_residual(s);
  if (!(res < 1e-9)) throw Error(Err::ConvergenceFailure, "root polishing stalled");
  // duplicates would mean two seeds collapsed
  for (size_t i = 0; i < s.roots.size(); ++i)
    for (size_t j = i + 1; j < s.roots.size(); ++j)
      if (std::abs(s.roots[i] - s.roots[j]) < 1e-10)
        throw Error(Err::ConvergenceFailure, "duplicate roots");
  return s;
}

double max_residual(const BetheSpectrum& s) {
  // |q_z(w)| / |z|^L
  double m = 0;
  int N = s.p.N, L = s.p.L;
  for (auto w : s.roots) {
    cplx t = std::exp(double(N) * std::log(w) + double(L - N) * std::log(w + 1.0) - s.logzL);
    m = std::max(m, std::abs(t - 1.0));
  }
  return m;
}

QPair q_partition(const BetheSpectrum& s, cplx w) {
  QPair r{1.0, 1.0};
  for (auto u : s.left) r.left *= (w - u);
  for (auto v : s.right) r.right *= (w - v);
  return r;
}

cplx q_full(const RingParams& p, cplx zL, cplx w) {
  return ipow(w, p.N) * ipow(w + 1.0, p.L - p.N) - zL;
}

cplx q_full_deriv_at_root(const BetheSpectrum& s, cplx w) {
  return s.zL * double(s.p.L) * (w + s.p.rho) / (w * (w + 1.0));
}

cplx q_right_deriv(const BetheSpectrum& s, int i) {
  cplx r = 1.0;
  for (int j = 0; j < int(s.right.size()); ++j)
    if (j != i) r *= s.right[i] - s.right[j];
  return r;
}

cplx q_left_deriv(const BetheSpectrum& s, int i) {
  cplx r = 1.0;
  for (int j = 0; j < int(s.left.size()); ++j)
    if (j != i) r *= s.left[i] - s.left[j];
  return r;
}

cplx log_prod_left(const BetheSpectrum& s, double power) {
  cplx r = 0;
  for (auto u : s.left) r += power * std::log(-u);
  return r;
}

cplx log_prod_right_p1(const BetheSpectrum& s, double power) {
  cplx r = 0;
  for (auto v : s.right) r += power * std::log(v + 1.0);
  return r;
}

cplx log_delta2(const cvec& W, const cvec& Wp) {
  cplx r = 0;
  for (auto a : W)
    for (auto b : Wp) r += std::log(a - b);
  return r;
}

double RootIdentityReport::max_dev() const {
  return std::max({dev_deriv, dev_cross, dev_product, dev_vieta, dev_qprime});
}

RootIdentityReport root_identities(const BetheSpectrum& s, double tol) {
  RootIdentityReport r;
  int N = s.p.N, L = s.p.L;
  auto dev = [](cplx loga, cplx logb) { return std::abs(std::exp(loga - logb) - 1.0); };
  // (a)
  cplx la = 0, lb = 0;
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j)
      if (j != i) la += std::log(s.right[i] - s.right[j]);
    for (int j = i + 1; j < N; ++j) lb += 2.0 * std::log(s.right[j] - s.right[i]);
  }
  long long e = (long long)N * (N - 1) / 2;
  if (e % 2) lb += cplx(0, PI);
  r.dev_deriv = dev(la, lb);
  // (b)
  cplx lc = 0;
  for (auto v : s.right)
    for (auto u : s.left) lc += std::log(v - u);
  r.dev_cross = dev(lc, log_delta2(s.right, s.left));
  // direct product on both sides as well, to catch sign issues of the log form
  {
    cplx a = 1.0, b = 1.0;
    for (auto v : s.right) a *= q_partition(s, v).left;
    for (auto v : s.right)
      for (auto u : s.left) b *= (v - u);
    if (std::isfinite(std::abs(a)) && std::abs(a) > 1e-250 && std::abs(a) < 1e250)
      r.dev_cross = std::max(r.dev_cross, std::abs(a / b - 1.0));
  }
  // (c)
  r.dev_product = dev(log_prod_left(s, N), log_prod_right_p1(s, L - N));
  // Vieta
  cplx lv = 0;
  for (auto w : s.roots) lv += std::log(w);
  cplx rhs = s.logzL + ((L + 1) % 2 ? cplx(0, PI) : 0.0);
  r.dev_vieta = dev(lv, rhs);
  // q'(v)/(q(v)+z^L) = L (v+rho)/(v(v+1)), q' by product over all other roots
  for (auto v : s.right) {
    cplx lq = 0;
    for (auto w : s.roots)
      if (w != v) lq += std::log(v - w);
    cplx lr = std::log(double(L) * (v + s.p.rho) / (v * (v + 1.0))) + s.logzL;
    r.dev_qprime = std::max(r.dev_qprime, dev(lq, lr));
  }
  if (r.max_dev() > tol) throw Error(Err::IdentityViolation, "root identity violated");
  return r;
}

}  // namespace pkpz
