#pragma once
#include <cstdint>
#include <random>

#include "finite_dist.hpp"

namespace pkpz {

// one period of particles; positions are unwrapped, so x_k for any label k comes from the periodic extension
struct RingState {
  RingParams p;
  std::vector<long long> x;  // x_1 > ... > x_N, always inside X_N(L)
  double time = 0;
  long long jumps = 0;
  long long position(long long k) const;  // x_k, k in Z
  bool occupied(long long site) const;
};

RingState initial_state(const InitialConfig& Y);

struct Trajectory {
  RingState start;
  std::vector<double> times;  // event times, increasing
  std::vector<int> who;       // representative index 0..N-1 that jumped
  RingState at(double t) const;
};

// independent 64-bit stream for (seed, stream)
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0);

// Gillespie race among the mobile particles, up to t_max
Trajectory simulate(const InitialConfig& Y, double t_max, std::uint64_t seed);
// same dynamics without keeping events, advancing s in place to time t >= s.time
void advance(RingState& s, double t, std::mt19937_64& g);

struct McEstimate {
  double estimate = 0;
  double stderr_ = 0;
  long long trials = 0;
};
// P(x_{k_i}(t_i) >= a_i for all i); trial j uses stream j of the seed
McEstimate joint_indicator(const InitialConfig& Y, std::vector<ObsPoint> pts, long long trials, std::uint64_t seed);

// H(x,t) from the occupation sums and the current J_0(t)
long long height_from_particles(const RingState& s, long long x, long long H0);
// H(l,t) >= b + H0  <=>  x_{(b-l)/2}(t) >= l; ParityViolation if b - l is odd
bool height_particle_equivalence(const RingState& s, long long b, long long l, long long H0);

}  // namespace pkpz
