#pragma once
#include <complex>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>
#include <cstdint>

namespace pkpz {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

constexpr double PI = 3.14159265358979323846;

enum class Err : int {
  Ok = 0,
  InvalidArgument = 1,
  RootsNearCritical = 2,
  ConvergenceFailure = 3,
  IdentityViolation = 4,
  SingularDenominator = 5,
  DegenerateEnergy = 6,
  DomainViolation = 7,
  TailBoundFailure = 8,
  WindowOverflow = 9,
  QuadratureStall = 10,
  AdaptivityFailure = 11,
  PoleAtRho = 12,
  SeriesNotConverged = 13,
  CalibrationUnresolved = 14,
  ParityViolation = 15,
  AnchorOutsideSupport = 16,
  OrderingViolation = 17,
  IOError = 18,
};

const char* err_name(Err e);

class Error : public std::runtime_error {
 public:
  Error(Err c, const std::string& msg) : std::runtime_error(msg), code_(c) {}
  Err code() const { return code_; }

 private:
  Err code_;
};

struct RingParams {
  int L = 0;
  int N = 0;
  double rho = 0;
  double r0 = 0;
  RingParams() = default;
  RingParams(int L_, int N_);
};

// integer power by repeated squaring, negative exponents allowed
inline cplx ipow(cplx w, long long n) {
  if (n < 0) return 1.0 / ipow(w, -n);
  cplx r = 1.0, b = w;
  while (n) {
    if (n & 1) r *= b;
    b *= b;
    n >>= 1;
  }
  return r;
}

// principal branch power exp(c Log w)
inline cplx ppow(cplx w, cplx c) { return std::exp(c * std::log(w)); }

// number of worker threads, capped by PKPZ_THREADS
int thread_count();

}  // namespace pkpz
