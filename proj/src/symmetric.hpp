#pragma once
#include <vector>

#include "bethe.hpp"

namespace pkpz {

struct InitialConfig {
  RingParams p;
  std::vector<long long> y;       // y_1 > ... > y_N
  std::vector<long long> lambda;  // y_j + j

  // periodic extension, k in Z (1-based): y_{k+N} = y_k - L
  long long y_ext(long long k) const;
  bool labeled() const;  // -(L-N) <= y_j + j <= 0
  static InitialConfig make(const RingParams& p, std::vector<long long> y, bool require_label = true);
  // relabeled/shifted configuration: hat y_i = y_{i+k} + c with the periodic extension
  InitialConfig shifted(int k, long long c) const;
  // step configuration y_j = -j
  static InitialConfig step(const RingParams& p);
};

cplx g_lambda(const cvec& W, const std::vector<long long>& lambda);
cplx energy_direct(const InitialConfig& Y, const BetheSpectrum& s);

struct PchOptions {
  double degenerate_tol = 1e-10;
};
// linear-system solution for all v in right, for a fixed u
cvec pch_cramer_all(const InitialConfig& Y, const BetheSpectrum& s, cplx u, const PchOptions& o = {});
cplx pch_cramer(const InitialConfig& Y, const BetheSpectrum& s, int v_index, cplx u, const PchOptions& o = {});
// determinant-ratio form
cplx pch_ratio(const InitialConfig& Y, const BetheSpectrum& s, int v_index, cplx u);
// residuals of the reproducing linear system for given pch values (one per right root)
std::vector<double> pch_system_residual(const InitialConfig& Y, const BetheSpectrum& s, cplx u, const cvec& pch);

}  // namespace pkpz
