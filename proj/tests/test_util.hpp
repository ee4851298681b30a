#pragma once
#include <algorithm>
#include <random>

#include "symmetric.hpp"

namespace pkpz::testing {

// uniform labeled configuration: an N-subset of {-L,...,-1}
inline InitialConfig random_config(const RingParams& p, std::mt19937_64& g) {
  std::vector<long long> all;
  for (long long x = -p.L; x <= -1; ++x) all.push_back(x);
  std::shuffle(all.begin(), all.end(), g);
  std::vector<long long> y(all.begin(), all.begin() + p.N);
  std::sort(y.rbegin(), y.rend());
  return InitialConfig::make(p, y);
}

inline double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace pkpz::testing
