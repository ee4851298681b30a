// pkpz: command-line front end over the C API
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pkpz/pkpz.h"
#include "table.hpp"

using nlohmann::ordered_json;
using pkpz_cli::Cell;
using pkpz_cli::Table;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// bad input -> exit 2, anything else -> exit 1
void check(int st, const std::string& what) {
  if (st == PKPZ_OK) return;
  std::string msg = what + ": " + pkpz_status_name(st) + ": " + pkpz_last_error();
  if (st == PKPZ_INVALID_ARGUMENT) throw UsageError(msg);
  throw CheckFailure(msg);
}

template <class T>
T* checked(T* p, const std::string& what) {
  if (!p) check(pkpz_last_status(), what);
  return p;
}

struct ConfigDel {
  void operator()(pkpz_Config* c) const { pkpz_Config_free(c); }
};
struct SpecDel {
  void operator()(pkpz_Spectrum* s) const { pkpz_Spectrum_free(s); }
};
struct ProfDel {
  void operator()(pkpz_Profile* p) const { pkpz_Profile_free(p); }
};
using ConfigPtr = std::unique_ptr<pkpz_Config, ConfigDel>;
using SpecPtr = std::unique_ptr<pkpz_Spectrum, SpecDel>;
using ProfPtr = std::unique_ptr<pkpz_Profile, ProfDel>;

std::vector<double> split_nums(const std::string& s, char sep, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, sep)) {
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (tok.empty() || *end) throw UsageError("cannot read " + what + " from '" + s + "'");
    out.push_back(v);
  }
  return out;
}

// "re" or "re,im"
std::pair<double, double> parse_complex(const std::string& s, const std::string& what) {
  auto v = split_nums(s, ',', what);
  if (v.size() == 1) return {v[0], 0.0};
  if (v.size() == 2) return {v[0], v[1]};
  throw UsageError(what + " takes re or re,im");
}

long long as_int(double v, const std::string& what) {
  if (v != std::floor(v)) throw UsageError(what + " must be an integer");
  return (long long)v;
}

// Y source: a JSON file {"L":6,"N":3,"y":[-1,-3,-5]}, or the step configuration
struct YSource {
  std::string file;
  std::vector<int> step;
  int L = 0, N = 0;
  std::vector<long long> y;
};

void add_y_options(CLI::App* c, YSource& ys) {
  c->add_option("--config", ys.file, "initial configuration JSON {\"L\":..,\"N\":..,\"y\":[..]}");
  c->add_option("--step", ys.step, "step configuration: L N (y_j = -j)")->expected(2);
}

ConfigPtr load_y(YSource& ys, ordered_json& meta) {
  if (!ys.file.empty() == !ys.step.empty()) throw UsageError("give exactly one of --config or --step");
  if (!ys.step.empty()) {
    ys.L = ys.step[0];
    ys.N = ys.step[1];
    ConfigPtr c(checked(pkpz_Config_new_step(ys.L, ys.N), "config error"));
    for (int j = 1; j <= ys.N; ++j) ys.y.push_back(-j);
    meta["Y"] = {{"L", ys.L}, {"N", ys.N}, {"y", ys.y}};
    return c;
  }
  std::ifstream f(ys.file);
  if (!f) throw UsageError("config error: cannot open " + ys.file);
  ordered_json j;
  try {
    j = ordered_json::parse(f);
    ys.L = j.at("L").get<int>();
    ys.N = j.at("N").get<int>();
    ys.y = j.at("y").get<std::vector<long long>>();
  } catch (const std::exception& e) {
    throw UsageError("config error: " + ys.file + ": " + e.what());
  }
  if ((int)ys.y.size() != ys.N) throw UsageError("config error: y must have N entries");
  ConfigPtr c(checked(pkpz_Config_new(ys.L, ys.N, ys.y.data()), "config error"));
  meta["Y"] = {{"L", ys.L}, {"N", ys.N}, {"y", ys.y}};
  return c;
}

struct ZSource {
  std::string z, zz;
  double margin = 0;
};

void add_z_options(CLI::App* c, ZSource& zs) {
  c->add_option("--z", zs.z, "z as re[,im]");
  c->add_option("--zz", zs.zz, "zz as re[,im], z^L = (-rho)^N (1-rho)^(L-N) zz");
  c->add_option("--margin", zs.margin, "refuse |z| > (1 - margin) r0 (default 0.02)")->check(CLI::Range(0.0, 1.0));
}

SpecPtr load_spectrum(int L, int N, const ZSource& zs, ordered_json& meta) {
  if (zs.z.empty() == zs.zz.empty()) throw UsageError("give exactly one of --z or --zz");
  pkpz_Spectrum* s;
  if (!zs.z.empty()) {
    auto [re, im] = parse_complex(zs.z, "--z");
    s = pkpz_Spectrum_new(L, N, re, im, zs.margin);
    meta["z"] = {re, im};
  } else {
    auto [re, im] = parse_complex(zs.zz, "--zz");
    s = pkpz_Spectrum_new_zz(L, N, re, im, zs.margin);
    meta["zz"] = {re, im};
  }
  checked(s, "spectrum");
  meta["margin"] = zs.margin > 0 ? zs.margin : 0.02;
  return SpecPtr(s);
}

struct Output {
  std::string format = "csv";
  std::string path;
};

void add_output_options(CLI::App* c, Output& o, const std::string& def) {
  o.format = def;
  c->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  c->add_option("--out", o.path, "output file (default stdout)");
}

void emit(const Table& t, const Output& o) {
  pkpz_cli::write_text(o.path, o.format == "json" ? pkpz_cli::dump_json(pkpz_cli::to_json(t)) : pkpz_cli::to_csv(t));
}

ordered_json base_meta(const std::string& sub) {
  ordered_json m;
  m["subcommand"] = sub;
  const char* th = std::getenv("PKPZ_THREADS");
  m["PKPZ_THREADS"] = th ? th : "";
  return m;
}

std::vector<long long> int_range(const std::string& s) {
  auto v = split_nums(s, ':', "range");
  if (v.size() != 2) throw UsageError("range is lo:hi");
  long long lo = as_int(v[0], "range"), hi = as_int(v[1], "range");
  if (hi < lo) throw UsageError("range lo:hi needs lo <= hi");
  std::vector<long long> out;
  for (long long a = lo; a <= hi; ++a) out.push_back(a);
  return out;
}

std::vector<pkpz_ObsPoint> parse_points(const std::vector<std::string>& ps) {
  if (ps.empty()) throw UsageError("need at least one --point k,t,a");
  std::vector<pkpz_ObsPoint> out;
  for (auto& s : ps) {
    auto v = split_nums(s, ',', "--point");
    if (v.size() != 3) throw UsageError("--point takes k,t,a");
    out.push_back({as_int(v[0], "k"), v[1], as_int(v[2], "a")});
  }
  return out;
}

ordered_json points_json(const std::vector<pkpz_ObsPoint>& pts) {
  auto a = ordered_json::array();
  for (auto& p : pts) a.push_back({{"k", p.k}, {"t", p.t}, {"a", p.a}});
  return a;
}

std::string point_spec(const std::vector<pkpz_ObsPoint>& pts) {
  std::string s;
  for (size_t i = 0; i < pts.size(); ++i) {
    std::ostringstream os;
    os << (i ? ";" : "") << "(" << pts[i].k << "," << pkpz_cli::fmt_real(pts[i].t) << "," << pts[i].a << ")";
    s += os.str();
  }
  return s;
}

// ---- subcommands ----

struct BetheArgs {
  int L = 0, N = 0;
  ZSource z;
  Output out;
};

int run_bethe(BetheArgs& a) {
  auto meta = base_meta("bethe");
  meta["L"] = a.L;
  meta["N"] = a.N;
  SpecPtr s = load_spectrum(a.L, a.N, a.z, meta);
  std::vector<double> right(2 * a.N), left(2 * (a.L - a.N));
  double z[2], res;
  check(pkpz_Spectrum_roots(s.get(), right.data(), left.data()), "bethe");
  check(pkpz_Spectrum_z(s.get(), z), "bethe");
  check(pkpz_Spectrum_max_residual(s.get(), &res), "bethe");
  if (a.out.format == "json") {
    ordered_json j;
    j["config"] = meta;
    j["z_re"] = z[0];
    j["z_im"] = z[1];
    j["max_residual"] = res;
    j["roots"] = ordered_json::array();
    for (int i = 0; i < a.N; ++i) j["roots"].push_back({{"re", right[2 * i]}, {"im", right[2 * i + 1]}, {"side", "right"}});
    for (int i = 0; i < a.L - a.N; ++i)
      j["roots"].push_back({{"re", left[2 * i]}, {"im", left[2 * i + 1]}, {"side", "left"}});
    pkpz_cli::write_text(a.out.path, pkpz_cli::dump_json(j));
    return 0;
  }
  Table t;
  meta["z_re"] = z[0];
  meta["z_im"] = z[1];
  meta["max_residual"] = res;
  t.config = meta;
  t.columns = {"side", "re", "im"};
  for (int i = 0; i < a.N; ++i) t.rows.push_back({std::string("right"), right[2 * i], right[2 * i + 1]});
  for (int i = 0; i < a.L - a.N; ++i) t.rows.push_back({std::string("left"), left[2 * i], left[2 * i + 1]});
  emit(t, a.out);
  return 0;
}

struct EnergyArgs {
  YSource y;
  ZSource z;
  double tol = 1e-5;
  Output out;
};

int run_energy(EnergyArgs& a) {
  auto meta = base_meta("energy");
  ConfigPtr c = load_y(a.y, meta);
  SpecPtr s = load_spectrum(a.y.L, a.y.N, a.z, meta);
  meta["tol"] = a.tol;
  double d[2], f[2];
  check(pkpz_energy(c.get(), s.get(), 0, d), "energy (determinant ratio)");
  check(pkpz_energy(c.get(), s.get(), 1, f), "energy (Fredholm)");
  double gap = std::hypot(d[0] - f[0], d[1] - f[1]) / std::hypot(d[0], d[1]);
  if (a.out.format == "json") {
    ordered_json j;
    j["config"] = meta;
    j["direct"] = {{"re", d[0]}, {"im", d[1]}};
    j["fredholm"] = {{"re", f[0]}, {"im", f[1]}};
    j["relative_gap"] = gap;
    pkpz_cli::write_text(a.out.path, pkpz_cli::dump_json(j));
  } else {
    Table t;
    t.config = meta;
    t.columns = {"direct_re", "direct_im", "fredholm_re", "fredholm_im", "relative_gap"};
    t.rows.push_back({d[0], d[1], f[0], f[1], gap});
    emit(t, a.out);
  }
  if (!(gap <= a.tol)) {
    std::ostringstream os;
    os << "energy: determinant ratio and Fredholm determinant differ by " << gap << " (tolerance " << a.tol << ")";
    throw CheckFailure(os.str());
  }
  return 0;
}

struct PchArgs {
  YSource y;
  ZSource z;
  std::string u;
  Output out;
};

int run_pch(PchArgs& a) {
  auto meta = base_meta("pch");
  ConfigPtr c = load_y(a.y, meta);
  SpecPtr s = load_spectrum(a.y.L, a.y.N, a.z, meta);
  auto [ure, uim] = parse_complex(a.u, "--u");
  meta["u"] = {ure, uim};
  int N = a.y.N;
  std::vector<double> right(2 * N), p(2 * N);
  check(pkpz_Spectrum_roots(s.get(), right.data(), nullptr), "pch");
  check(pkpz_pch(c.get(), s.get(), ure, uim, p.data()), "pch");
  Table t;
  t.config = meta;
  t.columns = {"v_re", "v_im", "pch_re", "pch_im"};
  for (int i = 0; i < N; ++i) t.rows.push_back({right[2 * i], right[2 * i + 1], p[2 * i], p[2 * i + 1]});
  emit(t, a.out);
  return 0;
}

struct DistArgs {
  YSource y;
  std::vector<std::string> points;
  std::string a_range;
  int nodes_cap = 0, series_cap = 0;
  double quad_tol = 0;
  bool direct_energy = false;
  Output out;
};

int run_dist(DistArgs& a) {
  auto meta = base_meta("dist");
  ConfigPtr c = load_y(a.y, meta);
  auto pts = parse_points(a.points);
  pkpz_DistOptions o{a.nodes_cap, a.series_cap, a.quad_tol, a.direct_energy ? 1 : 0};
  meta["points"] = points_json(pts);
  meta["a_range"] = a.a_range;
  meta["nodes_cap"] = o.nodes_cap ? o.nodes_cap : 512;
  meta["series_cap"] = o.series_cap ? o.series_cap : 3;
  meta["quad_tol"] = o.quad_tol > 0 ? o.quad_tol : 1e-10;
  meta["energy"] = a.direct_energy ? "determinant ratio" : "fredholm";
  std::vector<long long> as = a.a_range.empty() ? std::vector<long long>{pts.back().a} : int_range(a.a_range);
  Table t;
  t.config = meta;
  t.columns = {"a", "probability", "imag_residue", "series_tail", "quad_change", "nodes"};
  for (long long av : as) {
    pts.back().a = av;
    pkpz_DistResult r;
    check(pkpz_prob(c.get(), pts.data(), (int)pts.size(), &o, &r), "dist at " + point_spec(pts));
    t.rows.push_back({av, r.prob, r.imag, r.series_tail, r.quad_change, (long long)r.nodes});
  }
  emit(t, a.out);
  return 0;
}

struct SimArgs {
  YSource y;
  std::vector<std::string> points;
  std::string a_range;
  std::vector<double> times;
  long long trials = 100000;
  unsigned long long seed = 1;
  Output out;
};

int run_simulate(SimArgs& a) {
  auto meta = base_meta("simulate");
  ConfigPtr c = load_y(a.y, meta);
  auto pts = parse_points(a.points);
  meta["points"] = points_json(pts);
  meta["a_range"] = a.a_range;
  meta["t_list"] = a.times;
  meta["trials"] = a.trials;
  meta["seed"] = a.seed;
  std::vector<long long> as = a.a_range.empty() ? std::vector<long long>{pts.back().a} : int_range(a.a_range);
  std::vector<double> ts = a.times.empty() ? std::vector<double>{pts.back().t} : a.times;
  Table t;
  t.config = meta;
  t.columns = {"point_spec", "t", "a", "prob", "stderr"};
  for (double tv : ts)
    for (long long av : as) {
      pts.back().t = tv;
      pts.back().a = av;
      double est, se;
      check(pkpz_mc(c.get(), pts.data(), (int)pts.size(), a.trials, a.seed, &est, &se), "simulate");
      t.rows.push_back({point_spec(pts), tv, av, est, se});
    }
  emit(t, a.out);
  return 0;
}

struct LimitArgs {
  std::string profile_file;
  double flat = NAN;
  double wedge = NAN;
  std::vector<std::string> points;
  std::string beta_range;
  int n_steps = 400, nodes_cap = 0, series_cap = 0;
  double quad_tol = 0;
  Output out;
};

// {"special":"flat","value":v} | {"special":"wedge","floor":f} | {"breakpoints":[[alpha,h],...]}
ProfPtr load_profile(LimitArgs& a, ordered_json& meta) {
  int given = !a.profile_file.empty() + !std::isnan(a.flat) + !std::isnan(a.wedge);
  if (given != 1) throw UsageError("give exactly one of --profile, --flat, --wedge");
  ordered_json j;
  if (!std::isnan(a.flat))
    j = {{"special", "flat"}, {"value", a.flat}};
  else if (!std::isnan(a.wedge))
    j = {{"special", "wedge"}, {"floor", a.wedge}};
  else {
    std::ifstream f(a.profile_file);
    if (!f) throw UsageError("config error: cannot open " + a.profile_file);
    try {
      j = ordered_json::parse(f);
    } catch (const std::exception& e) {
      throw UsageError("config error: " + a.profile_file + ": " + e.what());
    }
  }
  meta["profile"] = j;
  try {
    if (j.contains("special")) {
      auto k = j["special"].get<std::string>();
      if (k == "flat") return ProfPtr(checked(pkpz_Profile_new_flat(j.value("value", 0.0)), "profile"));
      if (k == "wedge") return ProfPtr(checked(pkpz_Profile_new_wedge(j.value("floor", 10.0)), "profile"));
      throw UsageError("config error: unknown special profile '" + k + "'");
    }
    std::vector<double> al, h;
    for (auto& bp : j.at("breakpoints")) {
      al.push_back(bp.at(0).get<double>());
      h.push_back(bp.at(1).get<double>());
    }
    return ProfPtr(checked(pkpz_Profile_new_piecewise(al.data(), h.data(), (int)al.size()), "profile"));
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("config error: profile: ") + e.what());
  }
}

int run_limit(LimitArgs& a) {
  auto meta = base_meta("limit");
  ProfPtr h = load_profile(a, meta);
  if (a.points.empty()) throw UsageError("need at least one --point alpha,tau,beta");
  std::vector<pkpz_LimitPoint> pts;
  auto pj = ordered_json::array();
  for (auto& s : a.points) {
    auto v = split_nums(s, ',', "--point");
    if (v.size() != 3) throw UsageError("--point takes alpha,tau,beta");
    pts.push_back({v[0], v[1], v[2]});
    pj.push_back({{"alpha", v[0]}, {"tau", v[1]}, {"beta", v[2]}});
  }
  std::vector<double> betas{pts.back().beta};
  if (!a.beta_range.empty()) {
    auto v = split_nums(a.beta_range, ':', "--beta-range");
    if (v.size() != 3 || !(v[2] > 0) || v[1] < v[0]) throw UsageError("--beta-range is lo:hi:step with step > 0");
    betas.clear();
    int n = (int)std::floor((v[1] - v[0]) / v[2] + 1e-9);
    for (int i = 0; i <= n; ++i) betas.push_back(v[0] + i * v[2]);
  }
  pkpz_LimitOptions o{a.n_steps, a.quad_tol, a.nodes_cap, a.series_cap};
  meta["points"] = pj;
  meta["beta_range"] = a.beta_range;
  meta["n_steps"] = a.n_steps;
  meta["richardson"] = true;
  meta["quad_tol"] = o.quad_tol > 0 ? o.quad_tol : 1e-6;
  meta["nodes_cap"] = o.nodes_cap ? o.nodes_cap : 256;
  meta["series_cap"] = o.series_cap ? o.series_cap : 3;
  Table t;
  t.config = meta;
  t.columns = {"beta", "F", "imag", "quad_change", "nodes"};
  for (double b : betas) {
    pts.back().beta = b;
    pkpz_LimitResult r;
    check(pkpz_limit_F(h.get(), pts.data(), (int)pts.size(), &o, &r), "limit");
    t.rows.push_back({b, r.value, r.imag, r.quad_change, (long long)r.nodes});
  }
  emit(t, a.out);
  return 0;
}

struct ValidateArgs {
  bool quick = false;
  std::vector<int> only;
  Output out;
};

int run_validate(ValidateArgs& a) {
  auto meta = base_meta("validate");
  meta["quick"] = a.quick;
  std::vector<int> ids = a.only;
  if (ids.empty())
    for (int i = 1; i <= 13; ++i) ids.push_back(i);
  meta["criteria"] = ids;
  Table t;
  t.config = meta;
  t.columns = {"id", "name", "pass", "seconds", "detail"};
  int failed = 0;
  for (int id : ids) {
    int pass = 0;
    double sec = 0;
    char detail[2048] = {0};
    check(pkpz_criterion(id, a.quick, &pass, detail, sizeof detail, &sec), "validate");
    failed += !pass;
    std::fprintf(stderr, "check %2d %s: %s (%.1fs) %s\n", id, pass ? "PASS" : "FAIL", pkpz_criterion_name(id), sec,
                 detail);
    t.rows.push_back({(long long)id, std::string(pkpz_criterion_name(id)), std::string(pass ? "pass" : "fail"), sec,
                      std::string(detail)});
  }
  std::fprintf(stderr, "%d of %zu checks passed\n", int(ids.size()) - failed, ids.size());
  if (!a.out.path.empty()) emit(t, a.out);
  if (failed) throw CheckFailure(std::to_string(failed) + " check(s) failed");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pkpz: periodic TASEP transition probabilities, finite-L formulas and their limits"};
  app.require_subcommand(1);

  BetheArgs ba;
  auto* sb = app.add_subcommand("bethe", "Bethe roots for given z or zz");
  sb->add_option("--L", ba.L, "ring size")->required()->check(CLI::PositiveNumber);
  sb->add_option("--N", ba.N, "particles")->required()->check(CLI::PositiveNumber);
  add_z_options(sb, ba.z);
  add_output_options(sb, ba.out, "json");

  EnergyArgs ea;
  auto* se = app.add_subcommand("energy", "energy by determinant ratio and by Fredholm determinant");
  add_y_options(se, ea.y);
  add_z_options(se, ea.z);
  se->add_option("--tol", ea.tol, "allowed relative gap (exit 1 above it)");
  add_output_options(se, ea.out, "json");

  PchArgs pa;
  auto* sp = app.add_subcommand("pch", "pch(v, u) for every right root v");
  add_y_options(sp, pa.y);
  add_z_options(sp, pa.z);
  sp->add_option("--u", pa.u, "u as re[,im]")->required();
  add_output_options(sp, pa.out, "csv");

  DistArgs da;
  auto* sd = app.add_subcommand("dist", "P(x_k(t) >= a, ...) from the contour formula");
  add_y_options(sd, da.y);
  sd->add_option("--point", da.points, "k,t,a (repeat for joint events, increasing t)")->required();
  sd->add_option("--a-range", da.a_range, "lo:hi, sweeps a of the last point");
  sd->add_option("--nodes-cap", da.nodes_cap, "max nodes per circle")->check(CLI::Range(8, 1 << 16));
  sd->add_option("--series-cap", da.series_cap, "root-sum series depth")->check(CLI::Range(1, 8));
  sd->add_option("--quad-tol", da.quad_tol, "quadrature tolerance")->check(CLI::Range(1e-15, 1e-2));
  sd->add_flag("--direct-energy", da.direct_energy, "use the determinant ratio for the energy");
  add_output_options(sd, da.out, "csv");

  SimArgs ma;
  auto* sm = app.add_subcommand("simulate", "Monte Carlo estimate of the same events");
  add_y_options(sm, ma.y);
  sm->add_option("--point", ma.points, "k,t,a (repeat for joint events)")->required();
  sm->add_option("--a-range", ma.a_range, "lo:hi, sweeps a of the last point");
  sm->add_option("--t", ma.times, "list of times for the last point")->delimiter(',');
  sm->add_option("--trials", ma.trials, "number of trials")->check(CLI::PositiveNumber);
  sm->add_option("--seed", ma.seed, "RNG seed");
  add_output_options(sm, ma.out, "csv");

  LimitArgs la;
  auto* sl = app.add_subcommand("limit", "limiting distribution F for a periodic profile");
  sl->add_option("--profile", la.profile_file, "profile JSON");
  sl->add_option("--flat", la.flat, "flat profile at this height");
  sl->add_option("--wedge", la.wedge, "wedge profile with this floor depth");
  sl->add_option("--point", la.points, "alpha,tau,beta (repeat, increasing tau)")->required();
  sl->add_option("--beta-range", la.beta_range, "lo:hi:step, sweeps beta of the last point");
  sl->add_option("--n-steps", la.n_steps, "walk steps per unit time (even)")->check(CLI::Range(4, 1 << 20));
  sl->add_option("--nodes-cap", la.nodes_cap, "max nodes per circle")->check(CLI::Range(8, 1 << 14));
  sl->add_option("--series-cap", la.series_cap, "series depth per level")->check(CLI::Range(1, 8));
  sl->add_option("--quad-tol", la.quad_tol, "quadrature tolerance")->check(CLI::Range(1e-14, 1e-1));
  add_output_options(sl, la.out, "csv");

  ValidateArgs va;
  auto* sv = app.add_subcommand("validate", "identity and consistency checks");
  sv->add_flag("--quick", va.quick, "smaller grids and trial counts");
  sv->add_option("--only", va.only, "check ids (1..13)")->check(CLI::Range(1, 13))->delimiter(',');
  add_output_options(sv, va.out, "csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*sb) return run_bethe(ba);
    if (*se) return run_energy(ea);
    if (*sp) return run_pch(pa);
    if (*sd) return run_dist(da);
    if (*sm) return run_simulate(ma);
    if (*sl) return run_limit(la);
    if (*sv) return run_validate(va);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const CheckFailure& e) {
    std::fprintf(stderr, "failed: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "failed: %s\n", e.what());
    return 1;
  }
  return 2;
}
