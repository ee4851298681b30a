#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "energy.hpp"
#include "test_util.hpp"

using namespace pkpz;
using pkpz::testing::rel;

TEST_CASE("step energy through the determinant") {
  for (int L : {4, 6, 8}) {
    RingParams p(L, L / 2);
    auto s = solve_bethe(p, std::polar(0.4 * p.r0, 0.3));
    auto r = energy_fredholm(InitialConfig::step(p), s);
    CHECK(std::abs(r.value - 1.0) < 1e-6);
  }
}

TEST_CASE("residue-sum and u-quadrature kernels agree") {
  RingParams p(6, 3);
  auto s = solve_bethe(p, std::polar(0.3 * p.r0, 0.5));
  for (auto Y : {InitialConfig::step(p), InitialConfig::make(p, {-1, -3, -5})}) {
    EnergyOptions a, b;
    b.u_quadrature = true;
    auto Ka = ken_matrix(Y, s, 6, a), Kb = ken_matrix(Y, s, 6, b);
    CHECK((Ka - Kb).cwiseAbs().maxCoeff() < 1e-9 * std::max(1.0, Ka.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("K(0,0) against refined double quadrature") {
  RingParams p(4, 2);
  auto s = solve_bethe(p, 0.2 * p.r0);
  auto Y = InitialConfig::make(p, {-1, -3});
  EnergyOptions o;
  cplx k = ken_entry(Y, s, 0, 0, o);
  // 1024 x 1024 trapezoid: u on a circle around -1, v on a circle around 0
  int M = 1024;
  double maxl = 0;
  for (auto u : s.left) maxl = std::max(maxl, std::abs(u + 1.0));
  double R = 0.5 * (maxl + 1 - p.rho), rv = 0.3 * p.rho;
  for (auto v : s.right) rv = std::min(rv, 0.3 * std::abs(v));
  cvec vs(M);
  for (int n = 0; n < M; ++n) vs[n] = std::polar(rv, 2 * PI * (n + 0.25) / M);
  cplx tot = 0;
  for (int m = 0; m < M; ++m) {
    cplx e = std::polar(R, 2 * PI * (m + 0.5) / M), u = -1.0 + e;
    cplx t = ipow(u, 2) * ipow(u + 1.0, 2);
    cplx fu = e * t * s.zL / (t - s.zL);
    cvec c = ch_multi(Y, vs, u);
    for (int n = 0; n < M; ++n) tot += fu * c[n] * vs[n] * ipow(vs[n] + 1.0, -1 - 2) * ipow(vs[n], -2);
  }
  tot /= double(M) * M;
  CHECK(rel(k, tot) < 1e-9);
}

TEST_CASE("kernel decay in x and y") {
  RingParams p(6, 3);
  auto s = solve_bethe(p, std::polar(0.4 * p.r0, 1.0));
  auto Y = InitialConfig::make(p, {-2, -3, -6});
  auto r = energy_fredholm(Y, s);
  auto K = ken_matrix(Y, s, r.M);
  // rows carry (u+1)^(-x) with |u+1| < 1-rho; columns grow at most polynomially
  double last = K.bottomRows(1).cwiseAbs().maxCoeff(), corner = std::abs(K(r.M, r.M));
  MESSAGE("M=", r.M, " last row ", last, " corner ", corner, " max ", K.cwiseAbs().maxCoeff());
  CHECK(corner < 1e-12);
  double prev = 1e300;
  for (int i = 4; i <= r.M; i += 4) {
    double ri = K.row(i).cwiseAbs().maxCoeff();
    CHECK(ri < prev);
    prev = ri;
  }
}

TEST_CASE("Fredholm energy vs determinant ratio") {
  std::mt19937_64 g(9);
  for (int L : {6, 8}) {
    RingParams p(L, L / 2);
    for (int t = 0; t < 3; ++t) {
      auto Y = pkpz::testing::random_config(p, g);
      for (double f : {0.2, 0.4, 0.6}) {
        auto s = solve_bethe(p, std::polar(f * p.r0, 0.9 * t + 0.2));
        auto r = energy_fredholm(Y, s);
        CHECK(rel(r.value, energy_direct(Y, s)) < 1e-6);
      }
    }
  }
  RingParams p(6, 3);
  auto Y = InitialConfig::make(p, {-1, -3, -5});
  auto s = solve_bethe(p, std::polar(0.3 * p.r0, PI / 5));
  CHECK(rel(energy_fredholm(Y, s).value, energy_direct(Y, s)) < 1e-6);
}

TEST_CASE("determinant invariant under diagonal conjugation") {
  RingParams p(6, 3);
  auto s = solve_bethe(p, std::polar(0.5 * p.r0, 0.2));
  auto Y = InitialConfig::make(p, {-2, -4, -5});
  auto K = ken_matrix(Y, s, 24);
  Eigen::MatrixXcd C = K;
  for (int i = 0; i < K.rows(); ++i)
    for (int j = 0; j < K.cols(); ++j) C(i, j) *= std::pow(1 - p.rho, double(-i + j));
  auto I = Eigen::MatrixXcd::Identity(K.rows(), K.cols());
  cplx a = (I - K).partialPivLu().determinant(), b = (I - C).partialPivLu().determinant();
  CHECK(rel(a, b) < 1e-10);
}
