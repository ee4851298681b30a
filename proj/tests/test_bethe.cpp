#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>

#include "bethe.hpp"

using namespace pkpz;

TEST_CASE("quadratic closed form") {
  RingParams p(2, 1);
  auto s = solve_bethe(p, 0.3);
  double d = std::sqrt(1 + 4 * 0.09);
  cplx a = (-1 + d) / 2, b = (-1 - d) / 2;
  REQUIRE(s.right.size() == 1);
  REQUIRE(s.left.size() == 1);
  CHECK(std::abs(s.right[0] - a) < 1e-14);
  CHECK(std::abs(s.left[0] - b) < 1e-14);
}

TEST_CASE("partition sizes, residuals and Vieta") {
  for (auto [L, N] : std::vector<std::pair<int, int>>{{6, 3}, {6, 2}, {8, 4}, {9, 3}, {12, 5}, {50, 25}, {101, 40}, {300, 150}}) {
    RingParams p(L, N);
    for (double f : {0.2, 0.5, 0.9}) {
      cplx z = std::polar(f * p.r0, 0.7);
      auto s = solve_bethe(p, z);
      CHECK(int(s.left.size()) == L - N);
      CHECK(int(s.right.size()) == N);
      CHECK(max_residual(s) < 1e-11);
      cplx prod = 1;
      for (auto w : s.roots) prod *= w;
      cplx expect = (L % 2 ? 1.0 : -1.0) * s.zL;
      CHECK(std::abs(prod / expect - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("companion-matrix oracle at L=6, N=3") {
  RingParams p(6, 3);
  cplx z = std::polar(0.3 * p.r0, PI / 4);
  auto s = solve_bethe(p, z);
  // w^3 (w+1)^3 - z^6 coefficients
  std::vector<double> binom = {1, 3, 3, 1};
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(6, 6);
  std::vector<cplx> c(7, 0.0);  // c[k] coefficient of w^k
  for (int j = 0; j <= 3; ++j) c[3 + j] += binom[j];
  c[0] -= std::pow(z, 6);
  for (int i = 1; i < 6; ++i) C(i, i - 1) = 1;
  for (int i = 0; i < 6; ++i) C(i, 5) = -c[i] / c[6];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C);
  int nl = 0;
  for (int i = 0; i < 6; ++i) {
    cplx e = es.eigenvalues()(i);
    if (e.real() < -p.rho) ++nl;
    double best = 1e9;
    for (auto w : s.roots) best = std::min(best, std::abs(w - e));
    CHECK(best < 1e-10);
  }
  CHECK(nl == 3);
}

TEST_CASE("q_partition factorization") {
  RingParams p(4, 2);
  auto s = solve_bethe(p, 0.2 * p.r0);
  auto q0 = q_partition(s, 0.0);
  CHECK(std::abs(q0.left * q0.right + s.zL) < 1e-14);
  cplx w(-p.rho, 0.1);
  auto q = q_partition(s, w);
  CHECK(std::abs(q.left * q.right / q_full(p, s.zL, w) - 1.0) < 1e-10);
  CHECK(std::abs(q_partition(s, s.left[0]).left) < 1e-15);
}

TEST_CASE("root identities") {
  for (auto [L, N, f, th] : std::vector<std::tuple<int, int, double, double>>{
           {2, 1, 0.5, 0.0}, {6, 3, 0.3, PI / 5}, {6, 2, 0.4, 1.0}, {8, 4, 0.6, -2.0}, {40, 13, 0.7, 0.3}}) {
    RingParams p(L, N);
    auto s = solve_bethe(p, std::polar(f * p.r0, th));
    auto r = root_identities(s);
    CHECK(r.max_dev() < 1e-8);
  }
}

TEST_CASE("conjugation symmetry and continuity") {
  RingParams p(10, 4);
  cplx z = std::polar(0.5 * p.r0, 0.4);
  auto s = solve_bethe(p, z), c = solve_bethe(p, std::conj(z));
  for (auto w : s.roots) {
    double best = 1e9;
    for (auto x : c.roots) best = std::min(best, std::abs(std::conj(w) - x));
    CHECK(best < 1e-12);
  }
  auto s2 = solve_bethe(p, z + 1e-7);
  for (size_t i = 0; i < s.roots.size(); ++i) {
    double best = 1e9;
    for (auto x : s2.roots) best = std::min(best, std::abs(s.roots[i] - x));
    CHECK(best < 1e-7 * p.L * 10);
  }
}

TEST_CASE("near-critical z refused") {
  RingParams p(6, 3);
  CHECK_THROWS_AS(solve_bethe(p, 0.99 * p.r0), Error);
}
