#include "limit.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/zeta.hpp>
#include <functional>
#include <map>
#include <mutex>

#include "finite_dist.hpp"
#include "par.hpp"

namespace pkpz {

namespace {

const double SQ2PI = std::sqrt(2 * PI);

struct Rule {
  std::vector<double> x, w;
};

// Golub-Welsch on [-1, 1]
const Rule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, Rule> cache;
  std::lock_guard<std::mutex> g(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) J(i, i - 1) = J(i - 1, i) = i / std::sqrt(4.0 * i * i - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  Rule r;
  for (int i = 0; i < n; ++i) {
    r.x.push_back(es.eigenvalues()(i));
    r.w.push_back(2 * es.eigenvectors()(0, i) * es.eigenvectors()(0, i));
  }
  return cache[n] = r;
}

void composite(double a, double b, int panels, int order, std::vector<double>& x, std::vector<double>& w) {
  const Rule& r = gauss_legendre(order);
  double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    double c = a + (p + 0.5) * h;
    for (int i = 0; i < order; ++i) {
      x.push_back(c + 0.5 * h * r.x[i]);
      w.push_back(0.5 * h * r.w[i]);
    }
  }
}

double frac(double a) { return a - std::floor(a); }

double gauss_density(double var, double d) { return std::exp(-d * d / (2 * var)) / std::sqrt(2 * PI * var); }

double std_normal_cdf(double t) { return 0.5 * std::erfc(-t / std::sqrt(2.0)); }

// zeta(s-k)/k!, k = 0..kmax
const std::vector<double>& zeta_coeffs(double s) {
  static std::mutex mu;
  static std::map<double, std::vector<double>> cache;
  std::lock_guard<std::mutex> g(mu);
  auto it = cache.find(s);
  if (it != cache.end()) return it->second;
  std::vector<double> c;
  double fact = 1;
  for (int k = 0; k <= 90; ++k) {
    if (k) fact *= k;
    c.push_back(boost::math::zeta(s - k) / fact);
  }
  return cache[s] = c;
}

// P v: one lazy step, zero outside the window
template <class T>
void step_back(std::vector<T>& v, std::vector<T>& tmp) {
  int n = int(v.size());
  if (n == 0) return;
  if (n == 1) {
    tmp[0] = 0.5 * v[0];
  } else {
    tmp[0] = 0.5 * v[0] + 0.25 * v[1];
    for (int i = 1; i + 1 < n; ++i) tmp[i] = 0.5 * v[i] + 0.25 * (v[i - 1] + v[i + 1]);
    tmp[n - 1] = 0.5 * v[n - 1] + 0.25 * v[n - 2];
  }
  v.swap(tmp);
}

// number of window sites hit at step m
int hit_count(const WalkLattice& lat, int m) {
  long h = lat.H[m] - lat.jlo + 1;
  return int(std::clamp<long>(h, 0, lat.size()));
}

}  // namespace

// ---- profile

Profile Profile::flat(double value) {
  Profile p;
  p.kind_ = Kind::Flat;
  p.value_ = value;
  return p;
}

Profile Profile::piecewise(std::vector<std::pair<double, double>> pts) {
  if (pts.empty()) throw Error(Err::InvalidArgument, "profile needs at least one breakpoint");
  for (auto& q : pts) {
    if (!std::isfinite(q.first) || !std::isfinite(q.second))
      throw Error(Err::InvalidArgument, "profile breakpoints must be finite");
    q.first = frac(q.first);
  }
  std::sort(pts.begin(), pts.end());
  for (size_t i = 1; i < pts.size(); ++i)
    if (pts[i].first - pts[i - 1].first < 1e-12) throw Error(Err::InvalidArgument, "repeated breakpoint");
  Profile p;
  p.kind_ = Kind::Piecewise;
  p.pts_ = std::move(pts);
  p.anchor_ = p.pts_[0].first;
  return p;
}

Profile Profile::wedge(double floor) {
  if (!(floor > 0)) throw Error(Err::InvalidArgument, "wedge floor must be positive");
  Profile p;
  p.kind_ = Kind::Wedge;
  p.floor_ = floor;
  return p;
}

Profile Profile::shifted(double c1, double c2) const {
  Profile p = *this;
  p.c1_ += c1;
  p.c2_ += c2;
  p.anchor_ += c1;
  return p;
}

Profile Profile::anchored_at(double a) const {
  if (!in_support(a)) throw Error(Err::AnchorOutsideSupport, "anchor outside the support of h");
  Profile p = *this;
  p.anchor_ = a;
  return p;
}

double Profile::base(double a) const {
  switch (kind_) {
    case Kind::Flat: return value_;
    case Kind::Wedge: {
      double f = frac(a);
      return (f < 1e-9 || f > 1 - 1e-9) ? 0.0 : -floor_;
    }
    case Kind::Piecewise: {
      double f = frac(a);
      size_t n = pts_.size();
      if (n == 1) return pts_[0].second;
      size_t i = std::upper_bound(pts_.begin(), pts_.end(), std::make_pair(f, double(INFINITY))) - pts_.begin();
      // between pts_[i-1] and pts_[i], wrapping around
      auto lo = i == 0 ? std::make_pair(pts_[n - 1].first - 1, pts_[n - 1].second) : pts_[i - 1];
      auto hi = i == n ? std::make_pair(pts_[0].first + 1, pts_[0].second) : pts_[i];
      double t = (f - lo.first) / (hi.first - lo.first);
      return lo.second + t * (hi.second - lo.second);
    }
  }
  return 0;
}

double Profile::operator()(double alpha) const { return base(alpha - c1_) + c2_; }

double Profile::max_value() const {
  switch (kind_) {
    case Kind::Flat: return value_ + c2_;
    case Kind::Wedge: return c2_;
    case Kind::Piecewise: {
      double m = -INFINITY;
      for (auto& q : pts_) m = std::max(m, q.second);
      return m + c2_;
    }
  }
  return 0;
}

double Profile::min_value() const {
  switch (kind_) {
    case Kind::Flat: return value_ + c2_;
    case Kind::Wedge: return c2_ - floor_;
    case Kind::Piecewise: {
      double m = INFINITY;
      for (auto& q : pts_) m = std::min(m, q.second);
      return m + c2_;
    }
  }
  return 0;
}

bool Profile::in_support(double a) const {
  if (kind_ == Kind::Wedge) return base(a - c1_) == 0.0;
  return std::isfinite(a);
}

// ---- special functions

cplx polylog(double s, cplx z, double tol) {
  double a = std::abs(z);
  if (!(a < 1)) throw Error(Err::DomainViolation, "polylog needs |z| < 1");
  if (a == 0) return 0.0;
  if (s == 1) return -std::log(1.0 - z);
  bool integer = s == std::round(s);
  if (a <= 0.5 || integer) {
    cplx sum = 0, zk = z;
    for (long k = 1;; ++k) {
      sum += zk / std::pow(double(k), s);
      double tail = std::pow(a, k + 1) / (std::pow(double(k + 1), s) * (1 - a));
      if (tail < tol) break;
      if (k > 50000000) throw Error(Err::SeriesNotConverged, "polylog series");
      zk *= z;
    }
    return sum;
  }
  // Li_s(e^mu) = Gamma(1-s)(-mu)^(s-1) + sum zeta(s-k) mu^k / k!,  |mu| < 2 pi
  cplx mu = std::log(z);
  const auto& c = zeta_coeffs(s);
  cplx sum = boost::math::tgamma(1 - s) * std::pow(-mu, s - 1);
  cplx mk = 1.0;
  for (size_t k = 0; k < c.size(); ++k) {
    cplx term = c[k] * mk;
    sum += term;
    if (k > 4 && std::abs(term) < 0.1 * tol * std::max(1.0, std::abs(sum))) return sum;
    mk *= mu;
  }
  throw Error(Err::SeriesNotConverged, "polylog expansion around 1");
}

AFunctions a_functions(cplx zz) {
  return {-polylog(1.5, zz) / SQ2PI, -polylog(2.5, zz) / SQ2PI};
}

cplx b_function(cplx zz, cplx zz2, double tol, double* tail) {
  double a = std::abs(zz), b = std::abs(zz2);
  if (!(a < 1 && b < 1)) throw Error(Err::DomainViolation, "B needs |z|, |z'| < 1");
  if (a == 0 || b == 0) {
    if (tail) *tail = 0;
    return 0.0;
  }
  // terms are at most |z|^k |z'|^k' / 2
  auto cut = [&](double r) {
    int K = 1;
    while (0.5 * std::pow(r, K + 1) / ((1 - r) * (1 - std::max(a, b))) > tol) ++K;
    return K;
  };
  int K1 = cut(a), K2 = cut(b);
  cvec p1(K1 + 1), p2(K2 + 1);
  p1[0] = p2[0] = 1;
  for (int k = 1; k <= K1; ++k) p1[k] = p1[k - 1] * zz;
  for (int k = 1; k <= K2; ++k) p2[k] = p2[k - 1] * zz2;
  cplx s = 0;
  for (int k = 1; k <= K1; ++k)
    for (int j = 1; j <= K2; ++j) s += p1[k] * p2[j] / ((k + j) * std::sqrt(double(k) * j));
  if (tail) {
    double t = 0.5 * (std::pow(a, K1 + 1) / (1 - a) * b / (1 - b) + std::pow(b, K2 + 1) / (1 - b) * a / (1 - a));
    *tail = t / (4 * PI);
  }
  return s / (4 * PI);
}

cplx b_integral(cplx zz) {
  if (!(std::abs(zz) < 1)) throw Error(Err::DomainViolation, "B needs |z| < 1");
  std::vector<double> x, w;
  composite(0, 1, 16, 20, x, w);
  cplx s = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    cplx l = polylog(0.5, zz * x[i]);
    s += w[i] * l * l / x[i];
  }
  return s / (4 * PI);
}

ZetaRoots zeta_roots(cplx zz, double cap) {
  double a = std::abs(zz);
  if (!(a > 0 && a < 1)) throw Error(Err::DomainViolation, "root sets need 0 < |z| < 1");
  ZetaRoots r;
  r.zz = zz;
  cplx lz = std::log(zz);
  auto add = [&](long k) {
    cplx z = std::sqrt(-2.0 * (lz + cplx(0, 2 * PI * k)));
    if (std::abs(z) > cap) return false;
    r.right.push_back(z);
    r.left.push_back(-z);
    r.k.push_back(k);
    return true;
  };
  add(0);
  for (long k = 1;; ++k) {
    bool p = add(k), m = add(-k);
    // |zeta|^2 = 2|log z + 2 pi i k| grows in |k| once 2 pi |k| > |arg z|
    if (!p && !m) break;
  }
  for (auto z : r.right)
    if (std::abs(std::exp(-z * z / 2.0) - zz) > 1e-12) throw Error(Err::ConvergenceFailure, "root residual");
  return r;
}

namespace {

cplx li_half_term(cplx zz, cplx zsq, cplx y) { return polylog(0.5, zz * std::exp((zsq - y * y) / 2.0)); }

}  // namespace

cplx h_fun(cplx zeta, cplx zz, double) {
  if (zeta.real() == 0) throw Error(Err::DomainViolation, "h needs Re zeta != 0");
  if (zz == 0.0) return 0.0;
  cplx z0 = zeta.real() < 0 ? zeta : -zeta;
  double x0 = z0.real(), b = z0.imag();
  cplx zsq = z0 * z0;
  // ray: |w| = |z| exp(-(b^2 + 2|x0|u + u^2)/2)
  double need = std::max(0.0, 2 * std::log(std::abs(zz) * 1e18) - b * b);
  double U = -std::abs(x0) + std::sqrt(x0 * x0 + need);
  std::vector<double> x, w;
  if (U > 0) composite(0, U, std::max(1, int(std::ceil(U / 0.5))), 16, x, w);
  cplx s = 0;
  for (size_t i = 0; i < x.size(); ++i) s += w[i] * li_half_term(zz, zsq, x0 - x[i]);
  // segment from x0 to z0
  if (b != 0) {
    std::vector<double> t, wt;
    composite(0, 1, std::max(2, int(std::ceil(std::abs(b)))), 16, t, wt);
    for (size_t i = 0; i < t.size(); ++i) s += wt[i] * cplx(0, b) * li_half_term(zz, zsq, cplx(x0, b * t[i]));
  }
  return -s / SQ2PI;
}

cplx h_fun_ray(cplx zeta, cplx zz) {
  if (zeta.real() == 0) throw Error(Err::DomainViolation, "h needs Re zeta != 0");
  if (zz == 0.0) return 0.0;
  cplx z0 = zeta.real() < 0 ? zeta : -zeta;
  double x0 = z0.real();
  cplx zsq = z0 * z0;
  // |w| = |z| exp((2 x0 u - u^2)/2)
  double need = std::max(0.0, 2 * std::log(std::abs(zz) * 1e18));
  double U = x0 + std::sqrt(x0 * x0 + need);
  std::vector<double> x, w;
  composite(0, U, std::max(1, int(std::ceil(U / 0.5))), 16, x, w);
  cplx s = 0;
  for (size_t i = 0; i < x.size(); ++i) s += w[i] * li_half_term(zz, zsq, z0 - x[i]);
  return -s / SQ2PI;
}

cplx s_kernel(cplx zz, double x, double y, double tol) {
  double a = std::abs(zz);
  if (!(a < 1)) throw Error(Err::DomainViolation, "S needs |z| < 1");
  if (a == 0) return 0.0;
  double d2 = (x - y) * (x - y);
  cplx s = 0, zk = zz;
  for (int k = 1;; ++k) {
    s += zk * std::exp(-d2 / (2 * k)) / std::sqrt(2 * PI * k);
    if (std::pow(a, k + 1) / ((1 - a) * std::sqrt(2 * PI * (k + 1))) < tol) break;
    zk *= zz;
  }
  return s;
}

cplx f_lim(const std::vector<LimitPoint>& pts, int l, cplx zeta) {
  LimitPoint prev{0, 0, 0};
  if (l > 1) prev = pts.at(l - 2);
  const LimitPoint& cur = pts.at(l - 1);
  double dt = cur.tau - prev.tau, da = cur.alpha - prev.alpha, db = cur.beta - prev.beta;
  cplx e = -dt * zeta * zeta * zeta / 3.0 + da * zeta * zeta / 2.0 + db * zeta;
  return std::exp(zeta.real() < 0 ? e : -e);
}

// ---- lattice walk

WalkLattice make_walk_lattice(const std::function<double(double)>& h, int N, double offset, double lo, double hi) {
  if (N < 1) throw Error(Err::InvalidArgument, "n_steps must be positive");
  WalkLattice lat;
  lat.N = N;
  lat.c = std::sqrt(2.0 / N);
  lat.offset = offset;
  lat.jlo = long(std::floor((lo - offset) / lat.c));
  lat.jhi = long(std::ceil((hi - offset) / lat.c));
  lat.H.resize(N);
  for (int m = 0; m < N; ++m) {
    double v = h(-double(m) / N);
    lat.H[m] = long(std::floor((v - offset) / lat.c + 1e-9));
  }
  return lat;
}

HitKernelTable hit_kernel_table(const Profile& h, const std::vector<double>& ys, int n_steps, double hi) {
  HitKernelTable t;
  double lo = std::min(h.min_value(), 0.0) - 12;
  for (double y : ys) lo = std::min(lo, y - 12);
  t.lat = make_walk_lattice([&](double a) { return h(a); }, n_steps, h(0), lo, hi);
  const WalkLattice& lat = t.lat;
  int W = lat.size();
  t.T.resize(W, ys.size());
  parallel_for(ys.size(), [&](size_t k) {
    std::vector<double> F(W, 0.0), V(W, 0.0), tmp(W);
    double u = (ys[k] - lat.offset) / lat.c - double(lat.jlo);
    long i0 = long(std::floor(u));
    double f = u - i0;
    if (i0 < 0 || i0 + 1 >= W) throw Error(Err::WindowOverflow, "terminal point outside the walk window");
    F[i0] = (1 - f) / lat.c;
    F[i0 + 1] = f / lat.c;
    for (int m = lat.N - 1; m >= 0; --m) {
      step_back(F, tmp);
      step_back(V, tmp);
      int nh = hit_count(lat, m);
      for (int i = 0; i < nh; ++i) V[i] = F[i];
    }
    for (int i = 0; i < W; ++i) t.T(i, k) = V[i];
  });
  return t;
}

double brownian_hit_kernel(const Profile& h, double x, double y, int n_steps) {
  if (n_steps < 100) throw Error(Err::InvalidArgument, "n_steps must be at least 100");
  double hi = std::max({x, y, h.max_value()}) + 12;
  auto t = hit_kernel_table(h, {y}, n_steps, hi);
  double u = (x - t.lat.offset) / t.lat.c - double(t.lat.jlo);
  long i0 = long(std::floor(u));
  if (i0 < 0 || i0 + 1 >= t.lat.size()) return 0.0;
  double f = u - i0;
  return (1 - f) * t.T(i0, 0) + f * t.T(i0 + 1, 0);
}

namespace {

// restarted GMRES for A x = b, A given as a matvec
cvec gmres(const std::function<cvec(const cvec&)>& A, const cvec& b, double tol, int restart = 40, int max_outer = 50) {
  int n = int(b.size());
  Eigen::Map<const Eigen::VectorXcd> bb(b.data(), n);
  double bn = bb.norm();
  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(n);
  if (bn == 0) return cvec(n, 0.0);
  auto apply = [&](const Eigen::VectorXcd& v) {
    cvec in(v.data(), v.data() + n);
    cvec out = A(in);
    return Eigen::VectorXcd(Eigen::Map<Eigen::VectorXcd>(out.data(), n));
  };
  for (int outer = 0; outer < max_outer; ++outer) {
    Eigen::VectorXcd r = bb - apply(x);
    double beta = r.norm();
    if (beta <= tol * bn) return cvec(x.data(), x.data() + n);
    Eigen::MatrixXcd V(n, restart + 1), H = Eigen::MatrixXcd::Zero(restart + 1, restart);
    V.col(0) = r / beta;
    int k = 0;
    for (; k < restart; ++k) {
      Eigen::VectorXcd w = apply(V.col(k));
      for (int j = 0; j <= k; ++j) {
        H(j, k) = V.col(j).dot(w);
        w -= H(j, k) * V.col(j);
      }
      H(k + 1, k) = w.norm();
      if (std::abs(H(k + 1, k)) > 1e-300) V.col(k + 1) = w / H(k + 1, k);
      // residual of the small least squares problem
      Eigen::VectorXcd e1 = Eigen::VectorXcd::Zero(k + 2);
      e1(0) = beta;
      Eigen::MatrixXcd Hk = H.topLeftCorner(k + 2, k + 1);
      Eigen::VectorXcd y = Hk.colPivHouseholderQr().solve(e1);
      double res = (Hk * y - e1).norm();
      if (res <= tol * bn || std::abs(H(k + 1, k)) <= 1e-300 || k + 1 == restart) {
        x += V.leftCols(k + 1) * y;
        if (res <= tol * bn) return cvec(x.data(), x.data() + n);
        break;
      }
    }
  }
  throw Error(Err::ConvergenceFailure, "X fixed point did not settle");
}

}  // namespace

// ---- X_h

Eigen::MatrixXcd cal_x_matrix(const Profile& h, const cvec& etas, const cvec& xis, cplx zz, int N, double tol) {
  for (auto e : etas)
    if (!(e.real() > 0)) throw Error(Err::DomainViolation, "eta must have Re > 0");
  for (auto x : xis)
    if (!(x.real() < 0)) throw Error(Err::DomainViolation, "xi must have Re < 0");
  double hmin = h.min_value(), hmax = h.max_value();
  WalkLattice lat = make_walk_lattice([&](double a) { return h(a); }, N, h(h.anchor()), hmin - 20, hmax + 30);
  int W = lat.size();
  double c = lat.c;
  // s-sum range
  std::vector<int> sidx;
  for (int i = 0; i < W; ++i) {
    double x = lat.x(lat.jlo + i);
    if (x >= hmin - 10 && x <= hmax + 20) sidx.push_back(i);
  }
  std::vector<cplx> hx(xis.size());
  for (size_t j = 0; j < xis.size(); ++j) hx[j] = h_fun(xis[j], zz);
  Eigen::MatrixXcd X(etas.size(), xis.size());
  parallel_for(etas.size(), [&](size_t r) {
    cplx eta = etas[r];
    cplx lpsi = std::log((1.0 + std::cosh(eta * c)) / 2.0);
    cplx zeta_n = std::exp(-double(N) * lpsi);
    std::vector<cplx> ex(W), dm(N);
    for (int i = 0; i < W; ++i) ex[i] = std::exp(eta * lat.x(lat.jlo + i));
    for (int m = 0; m < N; ++m) dm[m] = std::exp(-double(m) * lpsi);
    // M(b) = E_b[e^{eta B_tau - eta^2 tau/2}, tau < inf]: M = sweep(M), affine in M
    std::vector<cplx> tmp(W);
    auto sweep = [&](const cvec& in, bool affine) {
      std::vector<cplx> U(W);
      for (int i = 0; i < W; ++i) U[i] = zeta_n * in[i];
      for (int m = N - 1; m >= 0; --m) {
        step_back(U, tmp);
        int nh = hit_count(lat, m);
        for (int i = 0; i < nh; ++i) U[i] = affine ? ex[i] * dm[m] : 0.0;
      }
      return cvec(U.begin(), U.end());
    };
    cvec b = sweep(cvec(W, 0.0), true);
    cvec M = gmres([&](const cvec& v) {
      cvec s = sweep(v, false);
      for (int i = 0; i < W; ++i) s[i] = v[i] - s[i];
      return s;
    }, b, tol);
    // Q(s) = E_s[1_{tau<1}(e^{eta B_tau - eta^2 tau/2} - z M(B_1))]
    std::vector<cplx> F(W), V(W, 0.0);
    for (int i = 0; i < W; ++i) F[i] = -zeta_n * M[i];
    for (int m = N - 1; m >= 0; --m) {
      step_back(F, tmp);
      step_back(V, tmp);
      int nh = hit_count(lat, m);
      for (int i = 0; i < nh; ++i) V[i] = ex[i] * dm[m] + F[i];
    }
    cplx he = h_fun(eta, zz);
    for (size_t j = 0; j < xis.size(); ++j) {
      cplx s = 0;
      for (int i : sidx) s += std::exp(-lat.x(lat.jlo + i) * xis[j]) * V[i];
      X(r, j) = std::exp(-hx[j] - he) * c * s;
    }
  });
  return X;
}

Eigen::MatrixXcd cal_x_richardson(const Profile& h, const cvec& etas, const cvec& xis, cplx zz, int n_steps,
                                  double tol) {
  if (n_steps % 2) throw Error(Err::InvalidArgument, "n_steps must be even");
  return 2.0 * cal_x_matrix(h, etas, xis, zz, n_steps, tol) - cal_x_matrix(h, etas, xis, zz, n_steps / 2, tol);
}

cplx cal_x(const Profile& h, cplx eta, cplx xi, cplx zz, int n_steps, double tol) {
  return cal_x_matrix(h, {eta}, {xi}, zz, n_steps, tol)(0, 0);
}

// ---- energy

EnergyLimit::EnergyLimit(const Profile& h, const LimitConfig& cfg) : h_(h) {
  if (!h.in_support(h.anchor())) throw Error(Err::AnchorOutsideSupport, "anchor outside the support of h");
  Profile ha = h.shifted(-h.anchor(), -h(h.anchor()));
  double X = std::max(0.0, ha.max_value()) + 10;
  composite(0, X, std::max(1, int(std::ceil(X * cfg.panels_per_unit))), cfg.gl_order, xs_, ws_);
  auto tab = hit_kernel_table(ha, xs_, cfg.n_steps, X + 22);
  const auto& lat = tab.lat;
  // lattice rows with 0 <= x' <= X + 10, trapezoid weights (half at 0)
  std::vector<int> rows;
  for (int i = 0; i < lat.size(); ++i) {
    double x = lat.x(lat.jlo + i);
    if (x > -1e-12 && x <= X + 10) {
      rows.push_back(i);
      xp_.push_back(x);
      wp_.push_back(std::abs(x) < 1e-12 ? lat.c / 2 : lat.c);
    }
  }
  int n = int(xs_.size());
  Tlat_.resize(rows.size(), n);
  for (size_t r = 0; r < rows.size(); ++r) Tlat_.row(r) = tab.T.row(rows[r]);
  Tnode_.resize(n, n);
  for (int i = 0; i < n; ++i) {
    double u = (xs_[i] - lat.offset) / lat.c - double(lat.jlo);
    long i0 = long(std::floor(u));
    double f = u - i0;
    Tnode_.row(i) = (1 - f) * tab.T.row(i0) + f * tab.T.row(i0 + 1);
  }
}

Eigen::MatrixXcd EnergyLimit::kernel(cplx zz) const {
  double a = std::abs(zz);
  if (!(a < 1)) throw Error(Err::DomainViolation, "energy needs |z| < 1");
  int n = int(xs_.size()), np = int(xp_.size());
  int K = 1;
  while (a > 0 && std::pow(a, K + 1) / (1 - a) > 1e-17) ++K;
  cvec zk(K + 1);
  zk[0] = 1;
  for (int k = 1; k <= K; ++k) zk[k] = zk[k - 1] * zz;
  // S(x_i, x'_j) w'_j
  Eigen::MatrixXcd S(n, np);
  parallel_for(n, [&](size_t i) {
    for (int j = 0; j < np; ++j) {
      double d = xs_[i] - xp_[j];
      cplx s = 0;
      for (int k = 1; k <= K; ++k) s += zk[k] * gauss_density(k, d);
      S(i, j) = s * wp_[j];
    }
  });
  Eigen::MatrixXcd Kn = Tnode_.cast<cplx>() + S * Tlat_.cast<cplx>();
  // x' < 0 always hits at time 0, so T is the free density there
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      cplx s = 0;
      for (int k = 1; k <= K; ++k) {
        double mu = (xs_[i] + k * xs_[j]) / (k + 1), v = double(k) / (k + 1);
        s += zk[k] * gauss_density(k + 1, xs_[i] - xs_[j]) * std_normal_cdf(-mu / std::sqrt(v));
      }
      Kn(i, j) += s;
    }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) Kn(i, j) *= zz * std::sqrt(ws_[i] * ws_[j]);
  return Kn;
}

cplx EnergyLimit::det(cplx zz) const {
  if (zz == 0.0) return 1.0;
  Eigen::MatrixXcd K = kernel(zz);
  K += Eigen::MatrixXcd::Identity(K.rows(), K.cols());
  return K.partialPivLu().determinant();
}

cplx EnergyLimit::operator()(cplx zz) const {
  if (zz == 0.0) return 1.0;
  return std::exp(-h_(h_.anchor()) * a_functions(zz).A1) * det(zz);
}

// ---- C, D, F

void check_points(const std::vector<LimitPoint>& pts) {
  if (pts.empty()) throw Error(Err::InvalidArgument, "need at least one point");
  for (size_t i = 0; i < pts.size(); ++i) {
    if (!(pts[i].tau > 0)) throw Error(Err::InvalidArgument, "tau must be positive");
    if (i == 0) continue;
    if (pts[i].tau < pts[i - 1].tau) throw Error(Err::OrderingViolation, "taus must be nondecreasing");
    if (pts[i].tau == pts[i - 1].tau && !(pts[i].beta > pts[i - 1].beta))
      throw Error(Err::OrderingViolation, "equal taus need strictly increasing betas");
  }
}

namespace {

void check_zz(const cvec& zz, size_t m) {
  if (zz.size() != m) throw Error(Err::InvalidArgument, "one z per point");
  for (size_t i = 0; i < m; ++i) {
    double a = std::abs(zz[i]);
    if (!(a > 0 && a < 1)) throw Error(Err::DomainViolation, "need 0 < |z| < 1");
    if (i && !(a < std::abs(zz[i - 1]))) throw Error(Err::InvalidArgument, "|z_l| must be strictly decreasing");
  }
}

// everything in C but the energy factor
cplx c_prefactor(const cvec& zz, const std::vector<LimitPoint>& pts) {
  int m = int(zz.size());
  std::vector<AFunctions> A;
  for (auto z : zz) A.push_back(a_functions(z));
  A.push_back({0.0, 0.0});
  cplx lg = 0;
  for (int l = 0; l < m; ++l) {
    if (l + 1 < m) lg += std::log(zz[l] / (zz[l] - zz[l + 1]));
    lg += pts[l].beta * (A[l].A1 - A[l + 1].A1) + pts[l].tau * (A[l].A2 - A[l + 1].A2);
    if (l >= 1) lg += 2.0 * b_function(zz[l], zz[l]) - 2.0 * b_function(zz[l], zz[l - 1]);
  }
  return std::exp(lg);
}

std::vector<std::vector<int>> combos(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  std::function<void(int)> go = [&](int start) {
    if (int(cur.size()) == k) {
      out.push_back(cur);
      return;
    }
    for (int i = start; i < n; ++i) {
      cur.push_back(i);
      go(i + 1);
      cur.pop_back();
    }
  };
  go(0);
  return out;
}

}  // namespace

cplx c_limit(const Profile& h, const cvec& zz, const std::vector<LimitPoint>& pts, const LimitConfig& cfg) {
  check_points(pts);
  check_zz(zz, pts.size());
  return c_prefactor(zz, pts) * EnergyLimit(h, cfg)(zz[0]);
}

LimitNode limit_node(const Profile& h, const cvec& zz, const std::vector<LimitPoint>& pts, const LimitConfig& cfg) {
  check_points(pts);
  check_zz(zz, pts.size());
  int m = int(zz.size());
  LimitNode nd;
  nd.wl.resize(m);
  nd.wr.resize(m);
  for (int l = 0; l < m; ++l) {
    ZetaRoots r = zeta_roots(zz[l], cfg.cap);
    int n = int(r.right.size());
    cvec wl(n), wr(n);
    // h is even in zeta, so one value per mirrored pair
    for (int i = 0; i < n; ++i) {
      cplx z = r.right[i];
      cplx lg = 2.0 * h_fun(z, zz[l]);
      if (l > 0) lg -= h_fun(z, zz[l - 1]);
      if (l + 1 < m) lg -= h_fun(z, zz[l + 1]);
      cplx g = std::exp(lg);
      wr[i] = f_lim(pts, l + 1, z) * g / z;
      wl[i] = f_lim(pts, l + 1, -z) * g / (-z);
    }
    double big = 0;
    for (int i = 0; i < n; ++i) big = std::max({big, std::abs(wl[i]), std::abs(wr[i])});
    ZetaRoots kept;
    kept.zz = r.zz;
    for (int i = 0; i < n; ++i) {
      if (std::abs(wr[i]) >= cfg.weight_cut * big) {
        kept.right.push_back(r.right[i]);
        nd.wr[l].push_back(wr[i]);
      }
      if (std::abs(wl[i]) >= cfg.weight_cut * big) {
        kept.left.push_back(r.left[i]);
        nd.wl[l].push_back(wl[i]);
      }
    }
    nd.roots.push_back(kept);
  }
  nd.X = cal_x_matrix(h, nd.roots[0].right, nd.roots[0].left, zz[0], cfg.n_steps, cfg.xfix_tol);
  return nd;
}

cplx d_limit_term(const LimitNode& nd, const cvec& zz, const std::vector<int>& n) {
  int m = int(nd.roots.size());
  if (int(n.size()) != m) throw Error(Err::InvalidArgument, "one n per level");
  cplx pref = 1.0;
  for (int l = 0; l + 1 < m; ++l) pref *= ipow(1.0 - zz[l + 1] / zz[l], n[l]) * ipow(1.0 - zz[l] / zz[l + 1], n[l + 1]);
  for (int l = 0; l + 1 < m; ++l)
    if (n[l] % 2) pref = -pref;
  std::vector<std::vector<std::vector<int>>> cl(m), cr(m);
  for (int l = 0; l < m; ++l) {
    if (n[l] < 0) throw Error(Err::InvalidArgument, "n must be nonnegative");
    cl[l] = combos(int(nd.wl[l].size()), n[l]);
    cr[l] = combos(int(nd.wr[l].size()), n[l]);
    if (cl[l].empty() || cr[l].empty()) return 0.0;
  }
  std::vector<const std::vector<int>*> sl(m), sr(m);
  cplx total = 0;
  std::function<void(int)> go = [&](int l) {
    if (l == m) {
      cplx w = 1.0;
      std::vector<cvec> XI(m), ETA(m);
      for (int k = 0; k < m; ++k) {
        for (int i : *sl[k]) {
          w *= nd.wl[k][i];
          XI[k].push_back(nd.roots[k].left[i]);
        }
        for (int i : *sr[k]) {
          w *= nd.wr[k][i];
          ETA[k].push_back(nd.roots[k].right[i]);
        }
      }
      int n1 = n[0];
      cplx dx = 1.0;
      if (n1 > 0) {
        Eigen::MatrixXcd A(n1, n1);
        for (int i = 0; i < n1; ++i)
          for (int j = 0; j < n1; ++j) A(i, j) = nd.X((*sr[0])[i], (*sl[0])[j]);
        dx = n1 == 1 ? A(0, 0) : A.partialPivLu().determinant();
      }
      cplx cd = 1.0;
      for (int k = 0; k + 1 < m; ++k) {
        cvec a = XI[k], b = ETA[k];
        a.insert(a.end(), ETA[k + 1].begin(), ETA[k + 1].end());
        b.insert(b.end(), XI[k + 1].begin(), XI[k + 1].end());
        cd *= cauchy_det(a, b);
      }
      cd *= cauchy_det(ETA[m - 1], XI[m - 1]);
      total += w * dx * cd;
      return;
    }
    for (auto& a : cl[l])
      for (auto& b : cr[l]) {
        sl[l] = &a;
        sr[l] = &b;
        go(l + 1);
      }
  };
  go(0);
  return pref * total;
}

cplx d_limit_term(const Profile& h, const cvec& zz, const std::vector<LimitPoint>& pts, const std::vector<int>& n,
                  const LimitConfig& cfg) {
  return d_limit_term(limit_node(h, zz, pts, cfg), zz, n);
}

cplx d_limit_det(const LimitNode& nd) {
  if (nd.roots.size() != 1) throw Error(Err::InvalidArgument, "determinant form is for one point");
  const auto& r = nd.roots[0];
  int nr = int(r.right.size()), nl = int(r.left.size());
  if (nr == 0 || nl == 0) return 1.0;
  Eigen::MatrixXcd A(nr, nl), B(nl, nr);
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nl; ++j) A(i, j) = nd.wr[0][i] * nd.X(i, j);
  for (int j = 0; j < nl; ++j)
    for (int i = 0; i < nr; ++i)
      B(j, i) = nd.wl[0][j] / (r.right[i] - r.left[j]);
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Identity(nr, nr) + A * B;
  return M.partialPivLu().determinant();
}

LimitD d_limit(const LimitNode& nd, const cvec& zz, int series_cap) {
  int m = int(nd.roots.size());
  LimitD out;
  if (m == 1) {
    out.value = d_limit_det(nd);
    return out;
  }
  int cap = series_cap;
  for (int l = 0; l < m; ++l)
    cap = std::min<int>(cap, int(std::min(nd.wl[l].size(), nd.wr[l].size())));
  std::vector<cplx> lev(m * cap + 1, 0.0);
  cplx edge = 0;
  std::vector<int> n(m, 0);
  std::function<void(int)> go = [&](int l) {
    if (l == m) {
      cplx t = d_limit_term(nd, zz, n);
      int s = 0, mx = 0;
      for (int x : n) {
        s += x;
        mx = std::max(mx, x);
      }
      lev[s] += t;
      if (mx == cap && cap > 0) edge += t;
      return;
    }
    for (int k = 0; k <= cap; ++k) {
      n[l] = k;
      go(l + 1);
    }
  };
  go(0);
  out.value = 0;
  for (auto v : lev) {
    out.value += v;
    out.level.push_back(std::abs(v));
  }
  out.tail = std::abs(edge);
  return out;
}

LimitD d_limit(const Profile& h, const cvec& zz, const std::vector<LimitPoint>& pts, const LimitConfig& cfg) {
  return d_limit(limit_node(h, zz, pts, cfg), zz, cfg.series_cap);
}

LimitF f_limit(const Profile& h, const std::vector<LimitPoint>& pts, const LimitConfig& cfg) {
  check_points(pts);
  int m = int(pts.size());
  std::vector<double> radii = cfg.radii;
  if (radii.empty()) {
    if (m == 1)
      radii = {0.7};
    else
      for (int l = 0; l < m; ++l) radii.push_back(0.7 - 0.4 * l / (m - 1));
  }
  if (int(radii.size()) != m) throw Error(Err::InvalidArgument, "one radius per point");
  // lattice error is O(1/N); with richardson the integrand is 2 I(N) - I(N/2)
  LimitConfig half = cfg;
  if (cfg.richardson) {
    if (cfg.n_steps % 2) throw Error(Err::InvalidArgument, "n_steps must be even");
    half.n_steps = cfg.n_steps / 2;
  }
  EnergyLimit en(h, cfg);
  std::unique_ptr<EnergyLimit> en2;
  if (cfg.richardson) en2 = std::make_unique<EnergyLimit>(h, half);
  auto integrand = [&](const cvec& zz) {
    cplx pre = c_prefactor(zz, pts);
    LimitNode nd = limit_node(h, zz, pts, cfg);
    cplx v = en(zz[0]) * d_limit(nd, zz, cfg.series_cap).value;
    if (cfg.richardson) {
      nd.X = cal_x_matrix(h, nd.roots[0].right, nd.roots[0].left, zz[0], half.n_steps, cfg.xfix_tol);
      v = 2.0 * v - (*en2)(zz[0]) * d_limit(nd, zz, cfg.series_cap).value;
    }
    return pre * v;
  };
  // trapezoid on the torus, nested node sets so doubling reuses values
  std::map<std::vector<int>, cplx> cache;  // indices on the finest grid seen so far, scaled to cap
  int top = cfg.nodes_cap;
  auto eval = [&](int n) {
    std::vector<std::vector<int>> idx;
    std::vector<int> cur(m);
    std::function<void(int)> go = [&](int l) {
      if (l == m) {
        idx.push_back(cur);
        return;
      }
      for (int j = 0; j < n; ++j) {
        cur[l] = j * (top / n);
        go(l + 1);
      }
    };
    go(0);
    std::vector<std::vector<int>> todo;
    for (auto& k : idx)
      if (!cache.count(k)) todo.push_back(k);
    std::vector<cplx> vals(todo.size());
    // the energy factor and X already run in parallel; keep this loop serial
    for (size_t t = 0; t < todo.size(); ++t) {
      cvec zz(m);
      for (int l = 0; l < m; ++l) zz[l] = std::polar(radii[l], 2 * PI * todo[t][l] / top);
      vals[t] = integrand(zz);
    }
    for (size_t t = 0; t < todo.size(); ++t) cache[todo[t]] = vals[t];
    cplx s = 0;
    for (auto& k : idx) s += cache[k];
    return s / double(idx.size());
  };
  if (top < cfg.nodes || top % cfg.nodes) throw Error(Err::InvalidArgument, "nodes_cap must be a multiple of nodes");
  LimitF out;
  int n = cfg.nodes;
  cplx prev = eval(n);
  for (;;) {
    if (2 * n > top) throw Error(Err::QuadratureStall, "contour quadrature did not settle");
    cplx cur = eval(2 * n);
    double ch = std::abs(cur - prev);
    n *= 2;
    prev = cur;
    out.quad_change = ch;
    if (ch < cfg.quad_tol) break;
  }
  out.value = prev.real();
  out.imag = prev.imag();
  out.nodes = n;
  return out;
}

// ---- finite L against the limit

std::vector<BridgeRow> scaling_bridge(const std::vector<int>& Ls, const BridgeConfig& cfg) {
  std::vector<BridgeRow> out;
  for (size_t i = 0; i < Ls.size(); ++i)
    if (i && Ls[i] <= Ls[i - 1]) throw Error(Err::InvalidArgument, "L list must increase");
  for (int L : Ls) {
    int N = int(std::lround(cfg.rho * L));
    RingParams p(L, N);
    double rho = p.rho, sig = std::sqrt(rho * (1 - rho));
    BetheOptions bo;
    bo.margin = 1e-6;
    auto s = solve_bethe_zz(p, cfg.zz, bo);
    auto s2 = solve_bethe_zz(p, cfg.zz2, bo);
    BridgeRow r;
    r.L = L;
    cplx lv = 0, lu = 0;
    for (auto v : s.right) lv += std::log(1.0 + v);
    for (auto u : s.left) lu += std::log(-u);
    r.lemma_gap = std::abs(std::exp((1 / rho - 1) * lv - lu) - 1.0);
    // k = N, the worst case of the corollary
    cplx lk = -cplx(0, PI * (N - 1)) - s.logzL + (1 / rho - 1) * lv;
    for (auto v : s.right) lk += std::log(v);
    r.corollary_gap = std::abs(std::exp(double(N) * lk) - 1.0);
    cplx A1 = a_functions(cfg.zz).A1;
    r.to_be_check = std::abs(std::exp(cfg.delta * std::sqrt(double(L)) * lv - std::sqrt(rho / (1 - rho)) * cfg.delta * A1) - 1.0);
    cplx lb = log_prod_left(s2, N) + log_prod_right_p1(s, L - N) - log_delta2(s.right, s2.left);
    r.b_gap = std::abs(std::exp(lb - 2.0 * b_function(cfg.zz, cfg.zz2)) - 1.0);
    cplx w = -rho + sig * cfg.zeta / std::sqrt(double(L));
    cplx lh = 0;
    if (w.real() < -rho) {
      for (auto v : s.right) lh += std::log(w - v);
      lh -= double(N) * std::log(w);
    } else {
      for (auto u : s.left) lh += std::log(w - u);
      lh -= double(L - N) * std::log(w + 1.0);
    }
    r.h_gap = std::abs(std::exp(lh - h_fun(cfg.zeta, cfg.zz)) - 1.0);
    out.push_back(r);
  }
  return out;
}

}  // namespace pkpz
