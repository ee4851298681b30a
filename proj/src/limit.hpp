#pragma once
#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "bethe.hpp"

namespace pkpz {

struct LimitPoint {
  double alpha = 0;
  double tau = 1;
  double beta = 0;
};

// 1-periodic initial profile; -floor stands in for -infinity
class Profile {
 public:
  enum class Kind { Flat, Piecewise, Wedge };
  static Profile flat(double value = 0);
  // breakpoints (alpha, h) with alpha in [0,1), linear in between, periodic
  static Profile piecewise(std::vector<std::pair<double, double>> pts);
  // 0 on the integers, -floor elsewhere
  static Profile wedge(double floor = 10);

  // h(. - c1) + c2; the anchor moves along
  Profile shifted(double c1, double c2) const;
  Profile anchored_at(double a) const;  // AnchorOutsideSupport if h(a) is the floor

  double operator()(double alpha) const;
  double anchor() const { return anchor_; }
  double max_value() const;
  double min_value() const;
  bool in_support(double a) const;
  Kind kind() const { return kind_; }
  double floor_depth() const { return floor_; }
  const std::vector<std::pair<double, double>>& breakpoints() const { return pts_; }

 private:
  Kind kind_ = Kind::Flat;
  double value_ = 0;
  std::vector<std::pair<double, double>> pts_;
  double floor_ = 10;
  double c1_ = 0, c2_ = 0;
  double anchor_ = 0;
  double base(double alpha) const;
};

// Li_s(z) for |z| < 1
cplx polylog(double s, cplx z, double tol = 1e-15);

struct AFunctions {
  cplx A1, A2;
};
AFunctions a_functions(cplx zz);
// double series; *tail gets the bound on what was left out
cplx b_function(cplx zz, cplx zz2, double tol = 1e-13, double* tail = nullptr);
// B(z, z) as (1/4pi) int_0^1 Li_{1/2}(z t)^2 / t dt
cplx b_integral(cplx zz);

struct ZetaRoots {
  cplx zz;
  cvec left, right;  // left[i] = -right[i]
  std::vector<long> k;
};
ZetaRoots zeta_roots(cplx zz, double cap = 8);

// h(zeta, z) along the ray (-inf, Re zeta0] and the segment up to zeta0 = -+zeta (Re zeta0 < 0)
cplx h_fun(cplx zeta, cplx zz, double tol = 1e-14);
// same integral along the horizontal ray zeta0 - u, u >= 0
cplx h_fun_ray(cplx zeta, cplx zz);

cplx s_kernel(cplx zz, double x, double y, double tol = 1e-15);

// f_l(zeta), l is 1-based; increments against point l-1 (or zero)
cplx f_lim(const std::vector<LimitPoint>& pts, int l, cplx zeta);

// lazy walk: steps -c, 0, +c with 1/4, 1/2, 1/4, c = sqrt(2/N); N steps per unit time
struct WalkLattice {
  int N = 0;
  double c = 0;
  double offset = 0;        // site j sits at offset + c j
  long jlo = 0, jhi = 0;    // window
  std::vector<long> H;      // hit at step m iff j <= H[m], m = 0..N-1
  int size() const { return int(jhi - jlo + 1); }
  double x(long j) const { return offset + c * double(j); }
};
// boundary at step m is h(-m/N)
WalkLattice make_walk_lattice(const std::function<double(double)>& h, int N, double offset, double lo, double hi);

// T_h(x, y) for the profile anchored as given (h itself, no re-anchoring)
double brownian_hit_kernel(const Profile& h, double x, double y, int n_steps = 2000);
// T(x_j, y_k) for all lattice sites x_j of the returned lattice and the given y
struct HitKernelTable {
  WalkLattice lat;
  Eigen::MatrixXd T;  // rows: lattice sites, cols: ys
};
HitKernelTable hit_kernel_table(const Profile& h, const std::vector<double>& ys, int n_steps, double hi);

struct LimitConfig {
  int n_steps = 400;          // walk steps per unit time
  double cap = 8;             // |zeta| cap on the root sets
  double weight_cut = 1e-13;  // drop roots whose weight is below this times the largest
  int panels_per_unit = 1;    // Nystrom panels per unit length
  int gl_order = 8;
  std::vector<double> radii;  // |zz_l| for the contours; empty -> 0.7 / 0.7 down to 0.3
  int nodes = 16;             // per circle, doubled until stable
  int nodes_cap = 256;
  double quad_tol = 1e-6;
  int series_cap = 3;         // per level, m >= 2 only
  double xfix_tol = 1e-12;    // relative residual for the M solve inside X
  bool richardson = true;     // F only: combine n_steps / 2 and n_steps
};

// X_h(eta_i, xi_j; zz) for right roots etas and left roots xis of zz
Eigen::MatrixXcd cal_x_matrix(const Profile& h, const cvec& etas, const cvec& xis, cplx zz, int n_steps = 2000,
                              double tol = 1e-13);
// 2 X(n_steps) - X(n_steps / 2)
Eigen::MatrixXcd cal_x_richardson(const Profile& h, const cvec& etas, const cvec& xis, cplx zz, int n_steps = 2000,
                                  double tol = 1e-12);
cplx cal_x(const Profile& h, cplx eta, cplx xi, cplx zz, int n_steps = 2000, double tol = 1e-13);

// e^{-h(a) A1(z)} det(I + K^en_{h_a}(z)); profile-only data is cached inside
class EnergyLimit {
 public:
  EnergyLimit(const Profile& h, const LimitConfig& cfg = {});
  cplx operator()(cplx zz) const;
  cplx det(cplx zz) const;  // det(I + K^en) alone
  Eigen::MatrixXcd kernel(cplx zz) const;  // weighted Nystrom matrix
  const std::vector<double>& nodes() const { return xs_; }

 private:
  Profile h_;
  std::vector<double> xs_, ws_;
  std::vector<double> xp_, wp_;  // lattice sites x' >= 0 with trapezoid weights
  Eigen::MatrixXd Tnode_, Tlat_;  // T(x_i, y_k), T(x'_j, y_k)
};

void check_points(const std::vector<LimitPoint>& pts);

cplx c_limit(const Profile& h, const cvec& zz, const std::vector<LimitPoint>& pts, const LimitConfig& cfg = {});

// everything D needs at one set of zz values
struct LimitNode {
  std::vector<ZetaRoots> roots;  // per level, after the weight cut
  std::vector<cvec> wl, wr;      // f g / zeta per level
  Eigen::MatrixXcd X;            // X(eta_i, xi_j) at level 1
};
LimitNode limit_node(const Profile& h, const cvec& zz, const std::vector<LimitPoint>& pts, const LimitConfig& cfg);

// D^(n) / prod (n_l!)^2, i.e. the sum over root subsets
cplx d_limit_term(const LimitNode& nd, const cvec& zz, const std::vector<int>& n);
cplx d_limit_term(const Profile& h, const cvec& zz, const std::vector<LimitPoint>& pts, const std::vector<int>& n,
                  const LimitConfig& cfg = {});
struct LimitD {
  cplx value;
  double tail = 0;            // size of the terms at the series cap, m >= 2
  std::vector<double> level;  // |sum of terms with sum(n) = s|
};
LimitD d_limit(const LimitNode& nd, const cvec& zz, int series_cap);
LimitD d_limit(const Profile& h, const cvec& zz, const std::vector<LimitPoint>& pts, const LimitConfig& cfg = {});
// m = 1 only: det(I + X B) with B(xi, eta) = w(xi) / (eta - xi)
cplx d_limit_det(const LimitNode& nd);

struct LimitF {
  double value = 0;
  double imag = 0;
  double quad_change = 0;
  int nodes = 0;
};
LimitF f_limit(const Profile& h, const std::vector<LimitPoint>& pts, const LimitConfig& cfg = {});

// finite-L products against their limits, rho = N/L
struct BridgeRow {
  int L = 0;
  double lemma_gap = 0;     // |prod (1+v)^{1/rho-1} / prod (-u) - 1|
  double corollary_gap = 0;  // |prod v^k (1+v)^{k(1/rho-1)} / ((-1)^{k(N-1)} z^{kL}) - 1| at k = N
  double to_be_check = 0;   // |prod (v+1)^{delta sqrt L} / e^{sqrt(rho/(1-rho)) delta A1} - 1|
  double b_gap = 0;         // |product / e^{2B(z,z')} - 1|
  double h_gap = 0;         // |H_z(w) / e^{h(zeta,z)} - 1|
};
struct BridgeConfig {
  double rho = 0.5;
  cplx zz = 0.5;
  cplx zz2 = 0.3;
  cplx zeta = cplx(1, 1);
  double delta = 1;
};
std::vector<BridgeRow> scaling_bridge(const std::vector<int>& Ls, const BridgeConfig& cfg = {});

}  // namespace pkpz
