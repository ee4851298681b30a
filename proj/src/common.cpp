#include "common.hpp"

#include <cstdlib>
#include <thread>

namespace pkpz {

const char* err_name(Err e) {
  switch (e) {
    case Err::Ok: return "Ok";
    case Err::InvalidArgument: return "InvalidArgument";
    case Err::RootsNearCritical: return "RootsNearCritical";
    case Err::ConvergenceFailure: return "ConvergenceFailure";
    case Err::IdentityViolation: return "IdentityViolation";
    case Err::SingularDenominator: return "SingularDenominator";
    case Err::DegenerateEnergy: return "DegenerateEnergy";
    case Err::DomainViolation: return "DomainViolation";
    case Err::TailBoundFailure: return "TailBoundFailure";
    case Err::WindowOverflow: return "WindowOverflow";
    case Err::QuadratureStall: return "QuadratureStall";
    case Err::AdaptivityFailure: return "AdaptivityFailure";
    case Err::PoleAtRho: return "PoleAtRho";
    case Err::SeriesNotConverged: return "SeriesNotConverged";
    case Err::CalibrationUnresolved: return "CalibrationUnresolved";
    case Err::ParityViolation: return "ParityViolation";
    case Err::AnchorOutsideSupport: return "AnchorOutsideSupport";
    case Err::OrderingViolation: return "OrderingViolation";
    case Err::IOError: return "IOError";
  }
  return "Unknown";
}

RingParams::RingParams(int L_, int N_) : L(L_), N(N_) {
  if (L_ <= 0 || N_ <= 0 || N_ >= L_)
    throw Error(Err::InvalidArgument, "need 0 < N < L");
  rho = double(N) / L;
  r0 = std::pow(rho, rho) * std::pow(1 - rho, 1 - rho);
}

int thread_count() {
  int hw = int(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  if (const char* s = std::getenv("PKPZ_THREADS")) {
    int cap = std::atoi(s);
    if (cap >= 1 && cap < hw) return cap;
  }
  return hw;
}

}  // namespace pkpz
