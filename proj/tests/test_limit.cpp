#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "limit.hpp"
#include "test_util.hpp"

using namespace pkpz;
using pkpz::testing::rel;

namespace {

cplx direct_polylog(double s, cplx z, int terms) {
  cplx sum = 0, zk = z;
  for (int k = 1; k <= terms; ++k) {
    sum += zk / std::pow(double(k), s);
    zk *= z;
  }
  return sum;
}

double p1(double d) { return std::exp(-d * d / 2) / std::sqrt(2 * PI); }

// 8-point Gauss-Legendre, fixed table
void gl8(double a, double b, int panels, std::vector<double>& x, std::vector<double>& w) {
  static const double X[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
                              0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
  static const double Wt[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
                               0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};
  double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    double c = a + (p + .5) * h;
    for (int i = 0; i < 8; ++i) {
      x.push_back(c + .5 * h * X[i]);
      w.push_back(.5 * h * Wt[i]);
    }
  }
}

// flat h = 0 by direct quadrature: M(y) = e^{-eta|y|}, reflection for T, first-passage density for tau
cplx flat_x_oracle(cplx eta, cplx xi, cplx z) {
  auto M = [&](double y) { return y <= 0 ? std::exp(eta * y) : std::exp(-eta * y); };
  auto Q = [&](double s) {
    std::vector<double> y, wy;
    gl8(std::min(s, 0.0) - 14, std::max(s, 0.0) + 14, 112, y, wy);
    cplx em = 0;
    for (size_t i = 0; i < y.size(); ++i) {
      double T = s <= 0 || y[i] < 0 ? p1(y[i] - s) : p1(s + y[i]);
      em += wy[i] * T * M(y[i]);
    }
    if (s <= 0) return std::exp(eta * s) - z * em;
    cplx a = 0;
    double lo = s * s / 400;
    if (lo < 1) {
      double r = std::pow(1 / lo, 1.0 / 60), t0 = lo;
      for (int k = 0; k < 60; ++k) {
        std::vector<double> t, wt;
        gl8(t0, t0 * r, 1, t, wt);
        for (size_t i = 0; i < t.size(); ++i)
          a += wt[i] * s / std::sqrt(2 * PI * t[i] * t[i] * t[i]) * std::exp(-s * s / (2 * t[i])) *
               std::exp(-eta * eta * t[i] / 2.0);
        t0 *= r;
      }
    }
    return a - z * em;
  };
  std::vector<double> s, ws;
  gl8(-14, -1e-300, 56, s, ws);
  gl8(0, 22, 176, s, ws);
  cplx tot = 0;
  for (size_t i = 0; i < s.size(); ++i) tot += ws[i] * std::exp(-s[i] * xi) * Q(s[i]);
  return std::exp(-h_fun(xi, z) - h_fun(eta, z)) * tot;
}

Profile bumpy() { return Profile::piecewise({{0.0, 0.0}, {0.3, 0.8}, {0.6, -0.4}}); }

}  // namespace

TEST_CASE("polylog against direct sums") {
  CHECK(std::abs(polylog(1, 0.5) - std::log(2.0)) < 1e-14);
  CHECK(rel(polylog(1, cplx(0.3, -0.6)), -std::log(1.0 - cplx(0.3, -0.6))) < 1e-14);
  CHECK(std::abs(polylog(2, 0.5) - (PI * PI / 12 - std::log(2.0) * std::log(2.0) / 2)) < 1e-13);
  CHECK(rel(polylog(0.5, 0.8), direct_polylog(0.5, 0.8, 6000)) < 1e-12);
  CHECK(rel(polylog(1.5, -0.9), direct_polylog(1.5, -0.9, 20000)) < 1e-12);
  CHECK(rel(polylog(0.5, std::polar(0.95, 2.0)), direct_polylog(0.5, std::polar(0.95, 2.0), 4000)) < 1e-11);
  CHECK(rel(polylog(2.5, 0.99), direct_polylog(2.5, 0.99, 20000)) < 1e-12);
  // both branches near the switch
  CHECK(rel(polylog(0.5, 0.5001), direct_polylog(0.5, 0.5001, 200)) < 1e-12);
  CHECK_THROWS_AS(polylog(0.5, 1.0), Error);
  try {
    polylog(1.5, cplx(0, 1.2));
  } catch (const Error& e) {
    CHECK(e.code() == Err::DomainViolation);
  }
}

TEST_CASE("A functions") {
  auto a = a_functions(0.4);
  CHECK(std::abs(a.A1.imag()) < 1e-15);
  CHECK(std::abs(a.A2.imag()) < 1e-15);
  auto s = a_functions(1e-7);
  CHECK(std::abs(s.A1 + 1e-7 / std::sqrt(2 * PI)) < 1e-6 * 1e-7);
}

TEST_CASE("B dual forms, symmetry and tail") {
  for (double z : {0.25, 0.5, 0.75}) {
    CAPTURE(z);
    CHECK(std::abs(b_function(z, z) - b_integral(z)) < 1e-8);
  }
  cplx z1(0.3, 0.4), z2(-0.2, 0.5);
  CHECK(std::abs(b_function(z1, z2) - b_function(z2, z1)) < 1e-15);
  double tail = 0;
  cplx coarse = b_function(z1, z2, 1e-5, &tail);
  CHECK(tail > 0);
  CHECK(std::abs(coarse - b_function(z1, z2, 1e-15)) <= tail);
  CHECK(b_function(0.0, 0.5) == 0.0);
}

TEST_CASE("zeta roots") {
  for (cplx zz : {std::polar(0.3, PI / 4), cplx(0.5), std::polar(0.7, -PI / 3)}) {
    auto r = zeta_roots(zz, 8);
    REQUIRE(!r.right.empty());
    for (size_t i = 0; i < r.right.size(); ++i) {
      CHECK(std::abs(std::exp(-r.right[i] * r.right[i] / 2.0) - zz) < 1e-12);
      CHECK(r.left[i] == -r.right[i]);
      CHECK(r.right[i].real() > 0);
      CHECK(std::abs(r.right[i]) <= 8);
    }
    // every branch within the cap is present
    std::size_t expect = 0;
    for (long k = -200; k <= 200; ++k)
      if (std::abs(std::sqrt(-2.0 * (std::log(zz) + cplx(0, 2 * PI * k)))) <= 8) ++expect;
    CHECK(r.right.size() == expect);
  }
  CHECK_THROWS_AS(zeta_roots(1.0), Error);
}

TEST_CASE("h function") {
  cplx zz = std::polar(0.6, 0.4);
  for (cplx zeta : {cplx(1.1, 0.3), cplx(-0.4, 2.0), cplx(2.5, -1.0)}) {
    CAPTURE(zeta);
    CHECK(std::abs(h_fun(zeta, zz) - h_fun(-zeta, zz)) < 1e-15);
    CHECK(std::abs(h_fun(zeta, zz) - h_fun_ray(zeta, zz)) < 1e-12);
    CHECK(std::abs(h_fun(std::conj(zeta), std::conj(zz)) - std::conj(h_fun(zeta, zz))) < 1e-14);
  }
  // Li_{1/2}(w) ~ w: h ~ -z e^{zeta0^2/2} Phi(zeta0) for real zeta0 = -1
  double z = 1e-6;
  double lin = -z * std::exp(0.5) * 0.5 * std::erfc(1 / std::sqrt(2.0));
  CHECK(std::abs(h_fun(1.0, z) - lin) < 1e-5 * std::abs(lin));
  CHECK_THROWS_AS(h_fun(cplx(0, 1), 0.5), Error);
}

TEST_CASE("S kernel against a partial sum") {
  cplx zz(0.5, 0.3);
  for (auto [x, y] : {std::pair{0.0, 0.0}, std::pair{1.0, -0.5}, std::pair{3.0, 0.2}}) {
    cplx s = 0, zk = zz;
    for (int k = 1; k <= 10000; ++k) {
      s += zk * std::exp(-(x - y) * (x - y) / (2 * k)) / std::sqrt(2 * PI * k);
      zk *= zz;
    }
    CHECK(std::abs(s_kernel(zz, x, y) - s) < 1e-14);
  }
}

TEST_CASE("profiles") {
  auto h = bumpy();
  CHECK(h(0.3) == doctest::Approx(0.8));
  CHECK(h(1.3) == doctest::Approx(0.8));
  CHECK(h(-0.7) == doctest::Approx(0.8));
  CHECK(h(0.15) == doctest::Approx(0.4));
  CHECK(h.max_value() == doctest::Approx(0.8));
  CHECK(h.min_value() == doctest::Approx(-0.4));
  auto g = h.shifted(0.1, 2.0);
  CHECK(g(0.4) == doctest::Approx(2.8));
  CHECK(g.anchor() == doctest::Approx(0.1));
  auto w = Profile::wedge(10);
  CHECK(w(3.0) == 0);
  CHECK(w(0.5) == -10);
  try {
    w.anchored_at(0.5);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Err::AnchorOutsideSupport);
  }
  CHECK(h.anchored_at(0.3).anchor() == doctest::Approx(0.3));
}

TEST_CASE("flat T against reflection") {
  auto fl = Profile::flat(0);
  double worst = 0;
  for (double x = 0; x <= 3.0001; x += 0.25)
    for (double y = 0; y <= 3.0001; y += 0.25) worst = std::max(worst, std::abs(brownian_hit_kernel(fl, x, y, 2000) - p1(x + y)));
  CHECK(worst < 1e-2);
  // below the level the walk is hit at once
  CHECK(std::abs(brownian_hit_kernel(fl, -0.5, 0.7, 2000) - p1(1.2)) < 1e-2);
  CHECK_THROWS_AS(brownian_hit_kernel(fl, 0, 0, 50), Error);
}

TEST_CASE("T for a non-flat profile") {
  auto h = bumpy();
  for (double x : {-1.0, 0.3, 1.5})
    for (double y : {-0.5, 0.5, 2.0}) {
      double a = brownian_hit_kernel(h, x, y, 1000), b = brownian_hit_kernel(h, x, y, 2000);
      CAPTURE(x);
      CAPTURE(y);
      CHECK(std::abs(a - b) < 2e-2);
      CHECK(b >= -1e-12);
      CHECK(b <= p1(x - y) + 1e-3);  // up to lattice error
    }
  // x below h(0): hit at time 0
  CHECK(std::abs(brownian_hit_kernel(h, -1.0, 0.5, 2000) - p1(1.5)) < 1e-2);
}

TEST_CASE("flat X against direct quadrature") {
  cplx z = std::polar(0.5, 0.6);
  auto r = zeta_roots(z, 4);
  auto X = cal_x_richardson(Profile::flat(0), r.right, r.left, z, 2000);
  double big = 0;
  for (size_t i = 0; i < r.right.size(); ++i) big = std::max(big, std::abs(X(i, i)));
  for (size_t i = 0; i < r.right.size(); ++i) {
    CAPTURE(i);
    CHECK(rel(X(i, i), flat_x_oracle(r.right[i], r.left[i], z)) < 1e-3);
    for (size_t j = 0; j < r.left.size(); ++j)
      if (j != i) CHECK(std::abs(X(i, j)) < 1e-3 * big);
  }
  CHECK_THROWS_AS(cal_x(Profile::flat(0), cplx(-1, 0), cplx(-1, 0), z, 200), Error);
}

TEST_CASE("X shift factor") {
  auto h = bumpy();
  cplx z = std::polar(0.5, 0.6);
  auto r = zeta_roots(z, 4);
  for (auto [c1, c2] : {std::pair{0.25, 0.7}, std::pair{-0.5, -1.3}}) {
    auto X = cal_x_richardson(h, r.right, r.left, z, 2000);
    auto Xs = cal_x_richardson(h.shifted(c1, c2), r.right, r.left, z, 2000);
    for (size_t i = 0; i < r.right.size(); ++i)
      for (size_t j = 0; j < r.left.size(); ++j) {
        cplx e = r.right[i], x = r.left[j];
        cplx pred = X(i, j) * std::exp(-0.5 * c1 * (x * x - e * e) + c2 * (e - x));
        CAPTURE(i);
        CAPTURE(j);
        CHECK(rel(Xs(i, j), pred) < 1e-3);
      }
  }
}

TEST_CASE("energy factor") {
  LimitConfig cfg;
  auto flat = EnergyLimit(Profile::flat(0), cfg);
  // conjugation symmetry, realness on the real axis
  CHECK(std::abs(flat(0.4).imag()) < 1e-12);
  CHECK(std::abs(flat(cplx(0.2, 0.3)) - std::conj(flat(cplx(0.2, -0.3)))) < 1e-12);
  CHECK(flat(0.0) == 1.0);
  CHECK(std::abs(flat(1e-6) - 1.0) < 1e-5);
  auto h = bumpy();
  EnergyLimit a(h.anchored_at(0.0), cfg), b(h.anchored_at(0.3), cfg), c(h.anchored_at(0.75), cfg);
  for (cplx zz : {cplx(0.5), cplx(0, 0.3), std::polar(0.7, 2.0)}) {
    CAPTURE(zz);
    CHECK(rel(b(zz), a(zz)) < 1e-2);
    CHECK(rel(c(zz), a(zz)) < 1e-2);
  }
  CHECK_THROWS_AS(flat(1.0), Error);
}

TEST_CASE("C factor") {
  auto fl = Profile::flat(0);
  std::vector<LimitPoint> one{{0, 1, 0.5}};
  CHECK(std::abs(c_limit(fl, {1e-7}, one) - 1.0) < 1e-6);
  CHECK(std::abs(c_limit(fl, {0.4}, one).imag()) < 1e-12);
  // h = c is the flat profile with beta shifted by -c
  cplx a = c_limit(Profile::flat(0.7), {cplx(0.3, 0.2)}, {{0, 1, 1.2}});
  cplx b = c_limit(fl, {cplx(0.3, 0.2)}, {{0, 1, 0.5}});
  CHECK(rel(a, b) < 1e-10);
  CHECK_THROWS_AS(c_limit(fl, {0.5, 0.6}, {{0, 1, 0}, {0, 2, 0}}), Error);
}

TEST_CASE("D terms") {
  auto fl = Profile::flat(0);
  cplx z = std::polar(0.5, 0.6);
  LimitConfig cfg;
  cfg.n_steps = 300;
  std::vector<LimitPoint> one{{0, 1, -0.5}};
  auto nd = limit_node(fl, {z}, one, cfg);
  CHECK(d_limit_term(nd, {z}, {0}) == 1.0);
  // finite determinant = sum over all subset sizes
  cplx s = 0;
  int n = int(std::min(nd.wl[0].size(), nd.wr[0].size()));
  for (int k = 0; k <= n; ++k) s += d_limit_term(nd, {z}, {k});
  CHECK(rel(d_limit_det(nd), s) < 1e-10);
  CHECK(d_limit_term(nd, {z}, {n + 1}) == 0.0);
  CHECK_THROWS_AS(d_limit_term(nd, {z}, {-1}), Error);

  // two levels: the series settles well before the cap
  std::vector<LimitPoint> two{{0, 1, 0}, {0, 1.5, 1}};
  cvec zz{std::polar(0.7, 0.3), std::polar(0.3, 1.0)};
  auto nd2 = limit_node(fl, zz, two, cfg);
  CHECK(d_limit_term(nd2, zz, {0, 0}) == 1.0);
  auto D3 = d_limit(nd2, zz, 3), D4 = d_limit(nd2, zz, 4);
  CHECK(D3.tail < 1e-8);
  CHECK(std::abs(D3.value - D4.value) <= 10 * D3.tail + 1e-14);
}

TEST_CASE("point ordering") {
  CHECK_THROWS_AS(check_points({}), Error);
  try {
    check_points({{0, 2, 0}, {0, 1, 0}});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Err::OrderingViolation);
  }
  try {
    check_points({{0, 1, 1}, {0.2, 1, 1}});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Err::OrderingViolation);
  }
  CHECK_NOTHROW(check_points({{0, 1, 0}, {0.3, 1, 0.5}, {0, 2, -1}}));
  CHECK_THROWS_AS(check_points({{0, 0, 0}}), Error);
}

TEST_CASE("one-point F") {
  auto fl = Profile::flat(0);
  LimitConfig cfg;
  cfg.n_steps = 200;
  cfg.quad_tol = 1e-6;
  auto F0 = f_limit(fl, {{0, 1, 0}}, cfg);
  CHECK(F0.value > 0);
  CHECK(F0.value < 1);
  CHECK(std::abs(F0.imag) < 1e-8);
  // the contour radius is free
  auto a = cfg, b = cfg;
  a.radii = {0.55};
  b.radii = {0.85};
  double Fa = f_limit(fl, {{0, 1, -1}}, a).value, Fb = f_limit(fl, {{0, 1, -1}}, b).value;
  CHECK(std::abs(Fa - Fb) < 1e-5);
  // shifting h by c is shifting beta by c
  double Fs = f_limit(Profile::flat(0.5), {{0, 1, -0.5}}, cfg).value;
  CHECK(std::abs(Fs - Fb) < 1e-5);
  LimitConfig odd = cfg;
  odd.n_steps = 201;
  CHECK_THROWS_AS(f_limit(fl, {{0, 1, 0}}, odd), Error);
}

TEST_CASE("two-point F reduces to one point") {
  auto fl = Profile::flat(0);
  LimitConfig cfg;
  cfg.n_steps = 100;
  cfg.nodes = 8;
  cfg.nodes_cap = 32;
  cfg.quad_tol = 1e-4;
  cfg.series_cap = 2;
  double F1 = f_limit(fl, {{0, 1, 0}}, cfg).value;
  double F2 = f_limit(fl, {{0, 1, 0}, {0, 1.5, 5}}, cfg).value;
  CHECK(std::abs(F2 - F1) < 1e-4);
}

TEST_CASE("finite L products against their limits") {
  for (double z : {0.3, 0.6}) {
    BridgeConfig c;
    c.zz = z;
    auto rows = scaling_bridge({64, 256, 1024}, c);
    for (auto& r : rows) {
      CHECK(r.lemma_gap < 1e-12);
      CHECK(r.corollary_gap < 1e-8);
    }
    CHECK(rows[1].to_be_check < rows[0].to_be_check);
    CHECK(rows[2].to_be_check < rows[1].to_be_check);
    double slope = std::log(rows[2].to_be_check / rows[0].to_be_check) / std::log(16.0);
    CHECK(slope <= -0.5);
    CHECK(rows[2].b_gap < 5e-2);
  }
  BridgeConfig c;
  auto rows = scaling_bridge({100, 400, 1600}, c);
  CHECK(rows[1].h_gap < rows[0].h_gap);
  CHECK(rows[2].h_gap < rows[1].h_gap);
  CHECK(rows[2].h_gap < 0.05);
  CHECK_THROWS_AS(scaling_bridge({400, 100}), Error);
}
