#include "symmetric.hpp"

#include <Eigen/Dense>

namespace pkpz {

namespace {
long long floordiv(long long a, long long b) {
  long long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}
}  // namespace

long long InitialConfig::y_ext(long long k) const {
  long long N = p.N;
  long long m = floordiv(k - 1, N);
  long long idx = (k - 1) - m * N;
  return y[idx] - m * p.L;
}

bool InitialConfig::labeled() const {
  for (int j = 0; j < p.N; ++j) {
    long long l = y[j] + j + 1;
    if (l > 0 || l < -(p.L - p.N)) return false;
  }
  return true;
}

InitialConfig InitialConfig::make(const RingParams& p, std::vector<long long> y, bool require_label) {
  if (int(y.size()) != p.N) throw Error(Err::InvalidArgument, "Y must have N entries");
  for (int j = 1; j < p.N; ++j)
    if (!(y[j] < y[j - 1])) throw Error(Err::InvalidArgument, "Y must be strictly decreasing");
  if (!(y[0] < y[p.N - 1] + p.L)) throw Error(Err::InvalidArgument, "need y_1 < y_N + L");
  InitialConfig Y;
  Y.p = p;
  Y.y = std::move(y);
  for (int j = 0; j < p.N; ++j) Y.lambda.push_back(Y.y[j] + j + 1);
  if (require_label && !Y.labeled())
    throw Error(Err::InvalidArgument, "Y violates -(L-N) <= y_j + j <= 0");
  return Y;
}

InitialConfig InitialConfig::shifted(int k, long long c) const {
  std::vector<long long> h(p.N);
  for (int i = 1; i <= p.N; ++i) h[i - 1] = y_ext(i + k) + c;
  return make(p, h, false);
}

InitialConfig InitialConfig::step(const RingParams& p) {
  std::vector<long long> y(p.N);
  for (int j = 0; j < p.N; ++j) y[j] = -(j + 1);
  return make(p, y);
}

cplx g_lambda(const cvec& W, const std::vector<long long>& lambda) {
  int N = int(W.size());
  if (int(lambda.size()) != N) throw Error(Err::InvalidArgument, "size mismatch");
  for (auto w : W)
    if (std::abs(w) == 0 || std::abs(w + 1.0) == 0) throw Error(Err::InvalidArgument, "w in {0,-1}");
  // denominator after row scaling by w_i^N: Vandermonde prod_{i<i'} (w_i - w_i')
  cplx den = 1.0;
  double scale = 0;
  for (auto w : W) scale = std::max(scale, std::abs(w));
  for (int i = 0; i < N; ++i)
    for (int k = i + 1; k < N; ++k) {
      cplx d = W[i] - W[k];
      if (std::abs(d) <= 1e-13 * std::max(1.0, scale))
        throw Error(Err::SingularDenominator, "duplicate w");
      den *= d;
    }
  Eigen::MatrixXcd A(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 1; j <= N; ++j) A(i, j - 1) = ipow(W[i], N - j) * ipow(W[i] + 1.0, lambda[j - 1]);
  cplx num = N ? A.partialPivLu().determinant() : cplx(1.0);
  return num / den;
}

cplx energy_direct(const InitialConfig& Y, const BetheSpectrum& s) {
  return g_lambda(s.right, Y.lambda);
}

cvec pch_cramer_all(const InitialConfig& Y, const BetheSpectrum& s, cplx u, const PchOptions& o) {
  int N = Y.p.N;
  cplx E = energy_direct(Y, s);
  if (std::abs(E) < o.degenerate_tol) throw Error(Err::DegenerateEnergy, "energy vanishes");
  cplx qRu = q_partition(s, u).right;
  Eigen::MatrixXcd M(N, N);
  Eigen::VectorXcd b(N);
  for (int i = 1; i <= N; ++i) {
    long long e = Y.y[i - 1] + i;
    for (int k = 0; k < N; ++k) {
      cplx v = s.right[k];
      cplx coef = ipow(v, N) * qRu / (ipow(u, N) * q_right_deriv(s, k));
      M(i - 1, k) = coef * ipow(v, -i) * ipow(v + 1.0, e);
    }
    b(i - 1) = -ipow(u, -i) * ipow(u + 1.0, e);
  }
  Eigen::VectorXcd x = M.partialPivLu().solve(b);
  return cvec(x.data(), x.data() + N);
}

cplx pch_cramer(const InitialConfig& Y, const BetheSpectrum& s, int v_index, cplx u, const PchOptions& o) {
  return pch_cramer_all(Y, s, u, o).at(v_index);
}

cplx pch_ratio(const InitialConfig& Y, const BetheSpectrum& s, int v_index, cplx u) {
  cvec W = s.right;
  cplx v = W.at(v_index);
  W[v_index] = u;
  return g_lambda(W, Y.lambda) / ((v - u) * g_lambda(s.right, Y.lambda));
}

std::vector<double> pch_system_residual(const InitialConfig& Y, const BetheSpectrum& s, cplx u, const cvec& pch) {
  int N = Y.p.N;
  cplx qRu = q_partition(s, u).right;
  std::vector<double> r(N);
  for (int i = 1; i <= N; ++i) {
    long long e = Y.y[i - 1] + i;
    cplx lhs = 0;
    for (int k = 0; k < N; ++k) {
      cplx v = s.right[k];
      lhs += ipow(v, N) * qRu / (ipow(u, N) * q_right_deriv(s, k)) * pch[k] * ipow(v, -i) * ipow(v + 1.0, e);
    }
    cplx rhs = -ipow(u, -i) * ipow(u + 1.0, e);
    r[i - 1] = std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs));
  }
  return r;
}

}  // namespace pkpz
