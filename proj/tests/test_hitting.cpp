#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <map>

#include "hitting.hpp"
#include "test_util.hpp"

using namespace pkpz;
using pkpz::testing::rel;

namespace {

// exhaustive enumeration of walk paths with jumps <= W
std::map<std::pair<int, long long>, double> brute_hits(const InitialConfig& Y, long long x0, int horizon, int W) {
  double rho = Y.p.rho;
  std::map<std::pair<int, long long>, double> out;
  std::function<void(int, long long, double)> go = [&](int m, long long g, double pr) {
    if (g > Y.y_ext(m + 1)) {
      out[{m, g}] += pr;
      return;
    }
    if (m + 1 >= horizon) return;
    for (int j = 1; j <= W; ++j) go(m + 1, g - j, pr * rho * std::pow(1 - rho, j - 1));
  };
  go(0, x0, 1.0);
  return out;
}

// ch by enumeration: closed tail plus start measure r^x over [y_N+N, y_1]
cplx brute_ch(const InitialConfig& Y, cplx v, cplx u, int W) {
  double rho = Y.p.rho;
  int N = Y.p.N;
  long long y1 = Y.y[0];
  cplx val = std::pow((1.0 + u) / (1.0 + v), double(y1 + 1)) / (v - u);
  cplx r = (1.0 + u) / (1 - rho), c = -v * (1 - rho) / ((1.0 + v) * rho);
  for (long long x = Y.y[N - 1] + N; x <= y1; ++x) {
    auto H = brute_hits(Y, x, N, W);
    for (auto& [ka, pr] : H) {
      auto [k, a] = ka;
      val += std::pow(r, double(x)) * pr * std::pow(1 - rho, double(a)) * std::pow(1.0 + v, double(-a - 1)) *
             std::pow(c, double(k));
    }
  }
  return val;
}

}  // namespace

TEST_CASE("hitting law trivial cases") {
  RingParams p(6, 3);
  auto Y = InitialConfig::make(p, {-1, -3, -5});
  auto h = hitting_law(Y, 2, 3);
  CHECK(h.prob(0, 2) == doctest::Approx(1.0));
  double rho = p.rho;
  auto Q = InitialConfig::make(p, {-1, -5, -6});
  auto q = hitting_law(Q, -1, 2);
  for (long long a = -4; a < -1; ++a) CHECK(q.prob(1, a) == doctest::Approx(rho * std::pow(1 - rho, -1 - a - 1)));
}

TEST_CASE("hitting law matches path enumeration") {
  RingParams p(6, 3);
  for (auto y : std::vector<std::vector<long long>>{{-1, -3, -5}, {-2, -4, -5}, {-3, -4, -6}}) {
    auto Y = InitialConfig::make(p, y);
    for (long long x0 : {-2, -1, -4}) {
      for (int hor : {1, 2, 3, 5}) {
        auto h = hitting_law(Y, x0, hor);
        auto b = brute_hits(Y, x0, hor, 50);
        for (auto& [ka, pr] : b) CHECK(std::abs(h.prob(ka.first, ka.second) - pr) < 1e-12);
        double tot = 0;
        for (auto& kv : b) tot += kv.second;
        CHECK(std::abs(h.hit_mass() - tot) < 1e-12);
        CHECK(std::abs(h.total_mass() - 1.0) < 1e-12);
      }
    }
  }
}

TEST_CASE("ch step configuration and enumeration oracle") {
  RingParams p(6, 3);
  cplx v = 0.1, u = -0.6;
  CHECK(rel(ch(InitialConfig::step(p), v, u), 1.0 / (v - u)) < 1e-14);
  auto Y = InitialConfig::make(p, {-1, -3, -5});
  CHECK(rel(ch(Y, v, u), brute_ch(Y, v, u, 60)) < 1e-9);
  auto Z = InitialConfig::make(p, {-2, -5, -6});
  CHECK(rel(ch(Z, cplx(0.05, 0.1), cplx(-0.8, 0.2)), brute_ch(Z, cplx(0.05, 0.1), cplx(-0.8, 0.2), 60)) < 1e-9);
  CHECK_THROWS_AS(ch(Y, v, cplx(-0.2, 0)), Error);
}

TEST_CASE("ch reproducing property") {
  RingParams p(6, 3);
  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> U(0, 1);
  int M = 256;
  double rv = 0.3 * std::min(p.rho, 1 - p.rho);
  for (int t = 0; t < 5; ++t) {
    auto Y = pkpz::testing::random_config(p, g);
    cplx u = -1.0 + std::polar((0.1 + 0.85 * U(g)) * (1 - p.rho), 2 * PI * U(g));
    cvec vs(M);
    for (int n = 0; n < M; ++n) vs[n] = std::polar(rv, 2 * PI * n / M);
    cvec c = ch_multi(Y, vs, u);
    for (int j = 1; j <= p.N; ++j) {
      long long e = Y.y[j - 1] + j;
      cplx I = 0;
      for (int n = 0; n < M; ++n) I += ipow(vs[n], -j) * ipow(vs[n] + 1.0, e) * c[n] * vs[n];
      I /= double(M);
      cplx rhs = -ipow(u, -j) * ipow(u + 1.0, e);
      CHECK(std::abs(I - rhs) < 1e-8 * std::max(1.0, std::abs(rhs)));
    }
  }
}

TEST_CASE("pch hitting form vs linear system") {
  std::mt19937_64 g(1);
  for (int L : {4, 6, 8}) {
    RingParams p(L, L / 2);
    for (int t = 0; t < 4; ++t) {
      auto Y = pkpz::testing::random_config(p, g);
      for (double f : {0.2, 0.4, 0.6}) {
        auto s = solve_bethe(p, std::polar(f * p.r0, 0.37 * t + f));
        for (auto u : s.left) {
          PchHitInfo info;
          cvec h = pch_hitting_multi(Y, s, s.right, u, {}, &info);
          for (double r : pch_system_residual(Y, s, u, h)) CHECK(r < 1e-7);
          if (std::abs(energy_direct(Y, s)) > 1e-3) {
            cvec c = pch_cramer_all(Y, s, u);
            double sc = 0;
            for (auto x : c) sc = std::max(sc, std::abs(x));
            for (int k = 0; k < p.N; ++k) CHECK(std::abs(h[k] - c[k]) < 1e-7 * sc);
          }
          cvec h2 = pch_hitting_multi(Y, s, s.right, u, {1e-13, 2});
          for (int k = 0; k < p.N; ++k) CHECK(std::abs(h2[k] - h[k]) < 1e-11 * std::max(1.0, std::abs(h[k])));
        }
      }
    }
  }
}

TEST_CASE("pch hitting shift identity") {
  RingParams p(6, 3);
  auto Y = InitialConfig::make(p, {-2, -3, -6});
  auto s = solve_bethe(p, std::polar(0.5 * p.r0, 0.4));
  for (auto [k, c] : std::vector<std::pair<int, int>>{{1, 0}, {1, 1}, {2, 2}}) {
    auto H = Y.shifted(k, c);
    cplx u = s.left[0];
    cvec a = pch_hitting_multi(H, s, s.right, u), b = pch_hitting_multi(Y, s, s.right, u);
    for (int i = 0; i < p.N; ++i) {
      cplx v = s.right[i];
      cplx f = ipow(u, k) * ipow(u + 1.0, -k + c) / (ipow(v, k) * ipow(v + 1.0, -k + c));
      CHECK(rel(a[i], b[i] * f) < 1e-7);
    }
  }
}

TEST_CASE("pch hitting is bounded through a zero of the energy") {
  // Y=(-1,-3,-5) at L=6 has energy zeros on |z| with some phase; scan a circle
  RingParams p(6, 3);
  auto Y = InitialConfig::make(p, {-1, -3, -5});
  double emin = 1e9;
  for (int n = 0; n < 64; ++n) {
    auto s = solve_bethe(p, std::polar(0.5 * p.r0, 2 * PI * n / 64 / 6));
    emin = std::min(emin, std::abs(energy_direct(Y, s)));
    cvec h = pch_hitting_multi(Y, s, s.right, s.left[0]);
    for (auto x : h) CHECK(std::isfinite(std::abs(x)));
  }
  CHECK(emin > 0);
}

TEST_CASE("martingale identity") {
  RingParams p(6, 3);
  for (auto y : std::vector<std::vector<long long>>{{-1, -3, -5}, {-2, -4, -5}, {-3, -4, -6}}) {
    auto Y = InitialConfig::make(p, y);
    for (int i = 1; i <= p.N; ++i)
      for (long long x = Y.y[2] + 3 - 5; x <= Y.y[0] + 5; ++x) {
        auto r = martingale_check(Y, i, x);
        CHECK(std::abs(r.lhs - r.rhs) < 1e-10);
        std::string d;
        CHECK_MESSAGE(martingale_check_exact(Y, i, x, &d), d);
      }
  }
}
