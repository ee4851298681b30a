#include "simulator.hpp"

#include <algorithm>
#include <atomic>

#include "par.hpp"

namespace pkpz {

namespace {

std::uint64_t splitmix64(std::uint64_t& s) {
  std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

long long floor_div(long long a, long long b) {
  long long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

long long RingState::position(long long k) const {
  long long N = p.N;
  long long r = ((k - 1) % N + N) % N;
  long long w = (k - 1 - r) / N;
  return x[r] - w * p.L;
}

bool RingState::occupied(long long site) const {
  for (auto xi : x)
    if (((site - xi) % p.L + p.L) % p.L == 0) return true;
  return false;
}

RingState initial_state(const InitialConfig& Y) {
  RingState s;
  s.p = Y.p;
  s.x = Y.y;
  return s;
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed ^ (stream * 0xd1342543de82ef95ULL);
  std::seed_seq seq{splitmix64(s), splitmix64(s), splitmix64(s), splitmix64(s)};
  return std::mt19937_64(seq);
}

namespace {

// one Gillespie step; returns the index that moved or -1 if t was reached first
int step(RingState& s, double t, std::mt19937_64& g) {
  int N = s.p.N;
  int mob[64];
  std::vector<int> big;
  int* m = mob;
  if (N > 64) {
    big.resize(N);
    m = big.data();
  }
  int n = 0;
  for (int i = 0; i < N; ++i) {
    long long ahead = i ? s.x[i - 1] : s.x[N - 1] + s.p.L;
    if (s.x[i] + 1 < ahead) m[n++] = i;
  }
  if (n == 0) {
    s.time = t;
    return -1;
  }
  double dt = std::exponential_distribution<double>(double(n))(g);
  if (s.time + dt >= t) {
    s.time = t;
    return -1;
  }
  s.time += dt;
  int i = m[std::uniform_int_distribution<int>(0, n - 1)(g)];
  ++s.x[i];
  ++s.jumps;
  return i;
}

}  // namespace

void advance(RingState& s, double t, std::mt19937_64& g) {
  if (t < s.time) throw Error(Err::InvalidArgument, "cannot advance backwards");
  while (step(s, t, g) >= 0) {
  }
}

Trajectory simulate(const InitialConfig& Y, double t_max, std::uint64_t seed) {
  if (t_max < 0) throw Error(Err::InvalidArgument, "t_max must be nonnegative");
  Trajectory tr;
  tr.start = initial_state(Y);
  RingState s = tr.start;
  auto g = make_rng(seed);
  for (;;) {
    int i = step(s, t_max, g);
    if (i < 0) break;
    tr.times.push_back(s.time);
    tr.who.push_back(i);
  }
  return tr;
}

RingState Trajectory::at(double t) const {
  RingState s = start;
  for (size_t e = 0; e < times.size() && times[e] <= t; ++e) {
    ++s.x[who[e]];
    ++s.jumps;
  }
  s.time = t;
  return s;
}

McEstimate joint_indicator(const InitialConfig& Y, std::vector<ObsPoint> pts, long long trials, std::uint64_t seed) {
  if (trials < 1) throw Error(Err::InvalidArgument, "trials must be >= 1");
  for (auto& q : pts)
    if (q.t < 0) throw Error(Err::InvalidArgument, "times must be nonnegative");
  std::stable_sort(pts.begin(), pts.end(), [](const ObsPoint& a, const ObsPoint& b) { return a.t < b.t; });
  const long long chunk = 1024;
  long long nchunks = (trials + chunk - 1) / chunk;
  std::atomic<long long> hits{0};
  parallel_for(size_t(nchunks), [&](size_t c) {
    long long lo = c * chunk, hi = std::min(trials, lo + chunk), h = 0;
    for (long long j = lo; j < hi; ++j) {
      auto g = make_rng(seed, std::uint64_t(j));
      RingState s = initial_state(Y);
      bool ok = true;
      for (auto& q : pts) {
        advance(s, q.t, g);
        if (s.position(q.k) < q.a) {
          ok = false;
          break;
        }
      }
      h += ok;
    }
    hits += h;
  });
  McEstimate r;
  r.trials = trials;
  r.estimate = double(hits) / double(trials);
  r.stderr_ = std::sqrt(r.estimate * (1 - r.estimate) / double(trials));
  return r;
}

long long height_from_particles(const RingState& s, long long x, long long H0) {
  // J_0: labels k >= 1 (all start left of 0) now at a site >= 0
  long long J0 = 0;
  for (auto xi : s.x)
    if (xi >= 0) J0 += floor_div(xi, s.p.L) + 1;
  long long h = H0 + 2 * J0;
  if (x >= 1)
    for (long long j = 0; j < x; ++j) h += 1 - 2 * s.occupied(j);
  else
    for (long long j = x; j <= -1; ++j) h -= 1 - 2 * s.occupied(j);
  return h;
}

bool height_particle_equivalence(const RingState& s, long long b, long long l, long long H0) {
  if ((b - l) % 2 != 0) throw Error(Err::ParityViolation, "b - l must be even");
  bool lhs = height_from_particles(s, l, H0) >= b + H0;
  bool rhs = s.position((b - l) / 2) >= l;
  return lhs == rhs;
}

}  // namespace pkpz
