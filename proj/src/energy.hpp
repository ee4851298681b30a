#pragma once
#include <Eigen/Dense>

#include "hitting.hpp"

namespace pkpz {

struct EnergyOptions {
  double tol = 1e-9;       // determinant stabilization
  double quad_tol = 1e-11; // v-quadrature doubling tolerance (relative to max(max entry, 1))
  int Mv = 128;            // v nodes
  int Mv_cap = 4096;
  int M_cap = 2048;        // truncation depth cap
  int M_start = 0;         // 0 -> ceil(4 sqrt L)
  bool u_quadrature = false;  // u-integral on a circle around -1 instead of the residue sum
  int Mu = 512;
};

// kernel matrix for x,y in {0,-1,...,-M}; entry (i,j) is K(-i,-j)
Eigen::MatrixXcd ken_matrix(const InitialConfig& Y, const BetheSpectrum& s, int M, const EnergyOptions& o = {},
                            int* Mv_used = nullptr);
cplx ken_entry(const InitialConfig& Y, const BetheSpectrum& s, long long x, long long y, const EnergyOptions& o = {});

struct EnergyResult {
  cplx value;       // energy via the Fredholm determinant
  cplx det;         // det(I-K)
  cplx prefactor;   // Delta(R;L) / (prod(-u)^N prod(v+1)^(L-N))
  int M = 0;        // truncation depth reached
  int Mv = 0;
  double det_change = 0;  // |det_M - det_2M|
};
EnergyResult energy_fredholm(const InitialConfig& Y, const BetheSpectrum& s, const EnergyOptions& o = {});
cplx energy_prefactor(const BetheSpectrum& s);

}  // namespace pkpz
