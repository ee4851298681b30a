#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "finite_dist.hpp"
#include "master_oracle.hpp"
#include "test_util.hpp"

using namespace pkpz;
using pkpz::testing::MasterOracle;
using pkpz::testing::rel;

namespace {

InitialConfig alt6() { return InitialConfig::make(RingParams(6, 3), {-1, -3, -5}); }

BetheSpectrum spec_at(const RingParams& p, cplx zz) {
  BetheOptions bo;
  bo.margin = 1e-3;
  return solve_bethe_zz(p, zz, bo);
}

}  // namespace

TEST_CASE("helpers") {
  RingParams p(6, 3);
  std::vector<ObsPoint> pts{{2, 0.7, 1}, {2, 0.7, 1}};
  for (cplx w : {cplx(-1.3, 0.2), cplx(0.1, -0.05)}) CHECK(std::abs(f_fn(pts, 2, w, p.rho) - 1.0) < 1e-15);
  CHECK(J_fn(p, 0.0) == 0.0);
  CHECK(H_fn(nullptr, cplx(0.3, 0.1)) == 1.0);
  CHECK_THROWS(J_fn(p, -0.5));
  auto s = spec_at(p, std::polar(0.4, 0.3));
  // H never vanishes on its own roots
  for (auto w : s.roots) CHECK(std::abs(H_fn(&s, w)) > 1e-6);
}

TEST_CASE("Cauchy determinant closed form") {
  std::mt19937_64 g(7);
  std::normal_distribution<double> n;
  for (int rep = 0; rep < 5; ++rep) {
    cvec W, Wp;
    for (int i = 0; i < 3; ++i) {
      W.emplace_back(n(g), n(g));
      Wp.emplace_back(n(g) + 3, n(g));
    }
    CHECK(rel(cauchy_det(W, Wp), cauchy_closed(W, Wp)) < 1e-10);
  }
}

TEST_CASE("D terms") {
  auto Y = alt6();
  auto s = spec_at(Y.p, std::polar(0.5, 0.7));
  std::vector<ObsPoint> pts{{1, 1.0, 1}};
  CHECK(std::abs(script_d_term(Y, {s}, pts, {0}) - 1.0) < 1e-15);
  // n = 1 by a plain double loop
  cplx direct = 0;
  cvec pr;
  for (auto u : s.left) {
    auto col = pch_cramer_all(Y, s, u);
    for (int i = 0; i < Y.p.N; ++i) {
      cplx v = s.right[i];
      direct += J_fn(Y.p, u) * f_fn(pts, 1, u, Y.p.rho) * g_fn({s}, 1, u) * J_fn(Y.p, v) *
                f_fn(pts, 1, v, Y.p.rho) * g_fn({s}, 1, v) * col[i] / (v - u);
    }
  }
  CHECK(rel(script_d_term(Y, {s}, pts, {1}), direct) < 1e-8);

  QuadConfig c0;
  c0.series_cap = 0;
  CHECK(script_d(Y, {s}, pts, c0).value == 1.0);
  auto D = script_d(Y, {s}, pts);
  REQUIRE(D.level.size() == 4);
  CHECK(D.level[3] < D.level[2]);
  CHECK(D.level[2] < D.level[1]);
  CHECK(D.tail == 0);
}

TEST_CASE("series cap convergence") {
  auto Y = InitialConfig::step(RingParams(8, 4));
  auto s = spec_at(Y.p, std::polar(0.5, 0.4));
  std::vector<ObsPoint> pts{{1, 1.0, 0}};
  QuadConfig c3, c4;
  c3.series_cap = 3;
  c4.series_cap = 4;
  auto d3 = script_d(Y, {s}, pts, c3), d4 = script_d(Y, {s}, pts, c4);
  CHECK(std::abs(d3.value - d4.value) < 1e-10);
  CHECK(d3.tail > 0);
  CHECK(d4.tail == 0);
}

TEST_CASE("D sees z only through z^L") {
  auto Y = alt6();
  cplx z = std::polar(0.5 * Y.p.r0, 0.37);
  auto s1 = solve_bethe(Y.p, z);
  auto s2 = solve_bethe(Y.p, z * std::polar(1.0, 2 * PI / Y.p.L));
  for (auto pts : {std::vector<ObsPoint>{{1, 1.0, 2}}, std::vector<ObsPoint>{{2, 0.3, 0}}}) {
    auto a = script_d(Y, {s1}, pts).value, b = script_d(Y, {s2}, pts).value;
    CHECK(std::abs(a - b) < 1e-10 * std::max(1.0, std::abs(a)));
  }
}

TEST_CASE("C for one point") {
  auto Y = alt6();
  auto s = spec_at(Y.p, std::polar(0.3, -0.8));
  ObsPoint q{1, 0.6, 2};
  cplx G = std::exp(log_prod_left(s, -double(q.k)) + log_prod_right_p1(s, double(-q.a - q.k)));
  for (auto v : s.right) G *= std::exp(q.t * v);
  CHECK(rel(script_c(Y, {s}, {q}), energy_fredholm(Y, s).det * G) < 1e-9);
  // relabelling k -> k + N, a -> a - L leaves C D unchanged pointwise
  ObsPoint r{q.k + Y.p.N, q.t, q.a - Y.p.L};
  cplx cd1 = script_c(Y, {s}, {q}) * script_d(Y, {s}, {q}).value;
  cplx cd2 = script_c(Y, {s}, {r}) * script_d(Y, {s}, {r}).value;
  CHECK(rel(cd2, cd1) < 1e-9);
}

TEST_CASE("two-level C factor") {
  auto Y = alt6();
  auto s1 = spec_at(Y.p, std::polar(0.6, 0.2)), s2 = spec_at(Y.p, std::polar(0.4, 1.1));
  std::vector<ObsPoint> pts{{1, 0.5, 0}, {2, 1.0, 1}};
  int N = Y.p.N, L = Y.p.L;
  cplx c = script_c(Y, {s1}, {pts[0]});
  ObsPoint d{pts[1].k - pts[0].k, pts[1].t - pts[0].t, pts[1].a - pts[0].a};
  c *= std::exp(log_prod_left(s2, -double(d.k)) + log_prod_right_p1(s2, double(-d.a - d.k)));
  for (auto v : s2.right) c *= std::exp(d.t * v);
  c *= std::exp(log_prod_left(s2, N) + log_prod_right_p1(s2, L - N) - log_delta2(s2.right, s2.left));
  c *= s1.zL / (s1.zL - s2.zL);
  c *= std::exp(log_delta2(s2.right, s1.left) - log_prod_left(s1, N) - log_prod_right_p1(s2, L - N));
  CHECK(rel(script_c(Y, {s1, s2}, pts), c) < 1e-9);
}

TEST_CASE("one point against the master equation") {
  MasterOracle ex6(alt6(), 40);
  auto Y = alt6();
  double prev = 1.0;
  for (long long a = -2; a <= 5; ++a) {
    auto r = multipoint_prob(Y, {{1, 1.0, a}});
    double e = ex6.joint({{1, 1.0, a}});
    CAPTURE(a);
    CHECK(std::abs(r.prob - e) < 1e-9);
    CHECK(std::abs(r.imag) < 1e-10);
    CHECK(r.prob <= prev + 1e-10);
    prev = r.prob;
  }
  // a <= y_k: certain
  CHECK(std::abs(multipoint_prob(Y, {{2, 1.0, Y.y[1]}}).prob - 1.0) < 1e-9);
  // other sizes, labels and starts
  struct Case {
    int L, N;
    std::vector<long long> y;
    ObsPoint q;
  };
  for (auto& c : std::vector<Case>{{5, 2, {-1, -4}, {1, 1.3, 3}},
                                   {7, 3, {-2, -3, -6}, {2, 0.8, 0}},
                                   {6, 2, {-1, -2}, {1, 1.0, 4}},
                                   {6, 3, {-1, -3, -5}, {3, 0.7, -2}},
                                   {6, 3, {-1, -3, -5}, {-1, 0.9, 6}}}) {
    auto Yc = InitialConfig::make(RingParams(c.L, c.N), c.y);
    MasterOracle ex(Yc, 40);
    CAPTURE(c.L);
    CAPTURE(c.q.k);
    CHECK(std::abs(multipoint_prob(Yc, {c.q}).prob - ex.joint({c.q})) < 1e-9);
  }
}

TEST_CASE("two points against the master equation") {
  auto Y = alt6();
  MasterOracle ex(Y, 40);
  for (auto pts : {std::vector<ObsPoint>{{1, 0.5, 0}, {1, 1.0, 1}}, std::vector<ObsPoint>{{1, 0.5, 1}, {1, 1.0, 3}},
                   std::vector<ObsPoint>{{2, 0.4, -1}, {1, 1.0, 2}}}) {
    auto r = multipoint_prob(Y, pts);
    CHECK(std::abs(r.prob - ex.joint(pts)) < 1e-9);
    CHECK(std::abs(r.imag) < 1e-10);
  }
}

TEST_CASE("literal measure integrates to zero") {
  auto Y = alt6();
  QuadConfig c;
  c.literal_measure = true;
  auto r = multipoint_prob(Y, {{1, 1.0, 1}}, c);
  CHECK(std::abs(r.prob) < 1e-9);
}

TEST_CASE("argument checks") {
  auto Y = alt6();
  QuadConfig c;
  c.fractions = {0.4, 0.6};
  CHECK_THROWS(multipoint_prob(Y, {{1, 0.5, 0}, {1, 1.0, 1}}, c));
  CHECK_THROWS(multipoint_prob(Y, {{1, 1.0, 0}, {1, 0.5, 1}}));
  CHECK_THROWS(multipoint_prob(Y, {}));
}
