#include "pkpz/pkpz.h"

#include <cstring>
#include <string>

#include "acceptance.hpp"
#include "energy.hpp"
#include "finite_dist.hpp"
#include "hitting.hpp"
#include "limit.hpp"
#include "simulator.hpp"
#include "symmetric.hpp"

struct pkpz_Config {
  pkpz::InitialConfig Y;
};
struct pkpz_Spectrum {
  pkpz::BetheSpectrum s;
};
struct pkpz_Profile {
  pkpz::Profile h;
};

namespace {

thread_local std::string last_error;
thread_local int last_status = PKPZ_OK;

template <class F>
int guard(F&& f) {
  try {
    f();
    last_error.clear();
    return last_status = PKPZ_OK;
  } catch (const pkpz::Error& e) {
    last_error = e.what();
    return last_status = int(e.code());
  } catch (const std::exception& e) {
    last_error = e.what();
    return last_status = PKPZ_INTERNAL;
  }
}

template <class T, class F>
T* make(F&& f) {
  T* out = nullptr;
  guard([&] { out = f(); });
  return out;
}

void need(bool ok, const char* msg) {
  if (!ok) throw pkpz::Error(pkpz::Err::InvalidArgument, msg);
}

std::vector<pkpz::ObsPoint> points(const pkpz_ObsPoint* pts, int m) {
  need(pts && m > 0, "need at least one point");
  std::vector<pkpz::ObsPoint> v;
  for (int i = 0; i < m; ++i) v.push_back({pts[i].k, pts[i].t, pts[i].a});
  return v;
}

}  // namespace

extern "C" {

const char* pkpz_last_error(void) { return last_error.c_str(); }
int pkpz_last_status(void) { return last_status; }

const char* pkpz_status_name(int status) {
  if (status == PKPZ_INTERNAL) return "Internal";
  return pkpz::err_name(pkpz::Err(status));
}

pkpz_Config* pkpz_Config_new(int L, int N, const long long* y) {
  return make<pkpz_Config>([&] {
    need(y != nullptr, "y is null");
    pkpz::RingParams p(L, N);
    return new pkpz_Config{pkpz::InitialConfig::make(p, std::vector<long long>(y, y + N))};
  });
}

pkpz_Config* pkpz_Config_new_step(int L, int N) {
  return make<pkpz_Config>([&] { return new pkpz_Config{pkpz::InitialConfig::step(pkpz::RingParams(L, N))}; });
}

void pkpz_Config_free(pkpz_Config* c) { delete c; }
int pkpz_Config_L(const pkpz_Config* c) { return c ? c->Y.p.L : 0; }
int pkpz_Config_N(const pkpz_Config* c) { return c ? c->Y.p.N : 0; }

pkpz_Spectrum* pkpz_Spectrum_new(int L, int N, double z_re, double z_im, double margin) {
  return make<pkpz_Spectrum>([&] {
    pkpz::BetheOptions o;
    if (margin > 0) o.margin = margin;
    return new pkpz_Spectrum{pkpz::solve_bethe(pkpz::RingParams(L, N), {z_re, z_im}, o)};
  });
}

pkpz_Spectrum* pkpz_Spectrum_new_zz(int L, int N, double zz_re, double zz_im, double margin) {
  return make<pkpz_Spectrum>([&] {
    pkpz::BetheOptions o;
    if (margin > 0) o.margin = margin;
    return new pkpz_Spectrum{pkpz::solve_bethe_zz(pkpz::RingParams(L, N), {zz_re, zz_im}, o)};
  });
}

void pkpz_Spectrum_free(pkpz_Spectrum* s) { delete s; }

int pkpz_Spectrum_roots(const pkpz_Spectrum* s, double* right, double* left) {
  return guard([&] {
    need(s != nullptr, "spectrum is null");
    if (right)
      for (size_t i = 0; i < s->s.right.size(); ++i) {
        right[2 * i] = s->s.right[i].real();
        right[2 * i + 1] = s->s.right[i].imag();
      }
    if (left)
      for (size_t i = 0; i < s->s.left.size(); ++i) {
        left[2 * i] = s->s.left[i].real();
        left[2 * i + 1] = s->s.left[i].imag();
      }
  });
}

int pkpz_Spectrum_z(const pkpz_Spectrum* s, double out[2]) {
  return guard([&] {
    need(s && out, "null argument");
    out[0] = s->s.z.real();
    out[1] = s->s.z.imag();
  });
}

int pkpz_Spectrum_max_residual(const pkpz_Spectrum* s, double* out) {
  return guard([&] {
    need(s && out, "null argument");
    *out = pkpz::max_residual(s->s);
  });
}

int pkpz_energy(const pkpz_Config* c, const pkpz_Spectrum* s, int method, double out[2]) {
  return guard([&] {
    need(c && s && out, "null argument");
    need(c->Y.p.L == s->s.p.L && c->Y.p.N == s->s.p.N, "configuration and spectrum sizes differ");
    need(method == 0 || method == 1, "method is 0 or 1");
    pkpz::cplx e = method == 1 ? pkpz::energy_fredholm(c->Y, s->s).value : pkpz::energy_direct(c->Y, s->s);
    out[0] = e.real();
    out[1] = e.imag();
  });
}

int pkpz_pch(const pkpz_Config* c, const pkpz_Spectrum* s, double u_re, double u_im, double* out) {
  return guard([&] {
    need(c && s && out, "null argument");
    need(c->Y.p.L == s->s.p.L && c->Y.p.N == s->s.p.N, "configuration and spectrum sizes differ");
    auto v = pkpz::pch_hitting_multi(c->Y, s->s, s->s.right, {u_re, u_im});
    for (size_t i = 0; i < v.size(); ++i) {
      out[2 * i] = v[i].real();
      out[2 * i + 1] = v[i].imag();
    }
  });
}

int pkpz_prob(const pkpz_Config* c, const pkpz_ObsPoint* pts, int m, const pkpz_DistOptions* opt,
              pkpz_DistResult* out) {
  return guard([&] {
    need(c && out, "null argument");
    pkpz::QuadConfig cfg;
    if (opt) {
      if (opt->nodes_cap) cfg.nodes_cap = opt->nodes_cap;
      if (opt->series_cap) cfg.series_cap = opt->series_cap;
      if (opt->quad_tol > 0) cfg.quad_tol = opt->quad_tol;
      cfg.fredholm_energy = !opt->direct_energy;
    }
    auto r = pkpz::multipoint_prob(c->Y, points(pts, m), cfg);
    *out = {r.prob, r.imag, r.series_tail, r.quad_change, r.nodes};
  });
}

int pkpz_mc(const pkpz_Config* c, const pkpz_ObsPoint* pts, int m, long long trials, uint64_t seed, double* estimate,
            double* stderr_out) {
  return guard([&] {
    need(c && estimate && stderr_out, "null argument");
    auto r = pkpz::joint_indicator(c->Y, points(pts, m), trials, seed);
    *estimate = r.estimate;
    *stderr_out = r.stderr_;
  });
}

pkpz_Profile* pkpz_Profile_new_flat(double value) {
  return make<pkpz_Profile>([&] { return new pkpz_Profile{pkpz::Profile::flat(value)}; });
}

pkpz_Profile* pkpz_Profile_new_wedge(double floor_depth) {
  return make<pkpz_Profile>([&] { return new pkpz_Profile{pkpz::Profile::wedge(floor_depth)}; });
}

pkpz_Profile* pkpz_Profile_new_piecewise(const double* alpha, const double* h, int n) {
  return make<pkpz_Profile>([&] {
    need(alpha && h && n > 0, "need breakpoints");
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < n; ++i) pts.push_back({alpha[i], h[i]});
    return new pkpz_Profile{pkpz::Profile::piecewise(pts)};
  });
}

void pkpz_Profile_free(pkpz_Profile* p) { delete p; }

int pkpz_limit_F(const pkpz_Profile* p, const pkpz_LimitPoint* pts, int m, const pkpz_LimitOptions* opt,
                 pkpz_LimitResult* out) {
  return guard([&] {
    need(p && pts && out && m > 0, "null argument");
    pkpz::LimitConfig cfg;
    if (opt) {
      if (opt->n_steps) cfg.n_steps = opt->n_steps;
      if (opt->quad_tol > 0) cfg.quad_tol = opt->quad_tol;
      if (opt->nodes_cap) cfg.nodes_cap = opt->nodes_cap;
      if (opt->series_cap) cfg.series_cap = opt->series_cap;
    }
    std::vector<pkpz::LimitPoint> v;
    for (int i = 0; i < m; ++i) v.push_back({pts[i].alpha, pts[i].tau, pts[i].beta});
    auto r = pkpz::f_limit(p->h, v, cfg);
    *out = {r.value, r.imag, r.quad_change, r.nodes};
  });
}

int pkpz_criterion(int id, int quick, int* pass, char* detail, size_t detail_cap, double* seconds) {
  return guard([&] {
    need(pass != nullptr, "null argument");
    pkpz::AcceptanceOptions o;
    o.quick = quick != 0;
    auto r = pkpz::run_criterion(id, o);
    *pass = r.pass;
    if (seconds) *seconds = r.seconds;
    if (detail && detail_cap) {
      std::strncpy(detail, r.detail.c_str(), detail_cap - 1);
      detail[detail_cap - 1] = 0;
    }
  });
}

const char* pkpz_criterion_name(int id) { return pkpz::criterion_name(id); }

}  // extern "C"
