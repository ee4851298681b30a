#include "finite_dist.hpp"

#include <functional>
#include <limits>
#include <mutex>

#include "par.hpp"

namespace pkpz {

cplx f_fn(const std::vector<ObsPoint>& pts, int i, cplx w, double rho) {
  ObsPoint prev{0, 0, 0};
  if (i > 1) prev = pts.at(i - 2);
  const ObsPoint& cur = pts.at(i - 1);
  long long dk = cur.k - prev.k, da = cur.a - prev.a;
  double dt = cur.t - prev.t;
  if (w.real() < -rho) return ipow(w, dk) * ipow(w + 1.0, -da - dk) * std::exp(dt * w);
  return ipow(w, -dk) * ipow(w + 1.0, da + dk) * std::exp(-dt * w);
}

cplx J_fn(const RingParams& p, cplx w) {
  if (std::abs(w + p.rho) < 1e-12) throw Error(Err::PoleAtRho, "J has a pole at -rho");
  return w * (w + 1.0) / (double(p.L) * (w + p.rho));
}

cplx H_fn(const BetheSpectrum* s, cplx w) {
  if (!s) return 1.0;
  auto q = q_partition(*s, w);
  if (w.real() < -s->p.rho) return q.right / ipow(w, s->p.N);
  return q.left / ipow(w + 1.0, s->p.L - s->p.N);
}

cplx g_fn(const std::vector<BetheSpectrum>& specs, int l, cplx w) {
  int m = int(specs.size());
  const BetheSpectrum* prev = l >= 2 ? &specs[l - 2] : nullptr;
  const BetheSpectrum* next = l < m ? &specs[l] : nullptr;
  cplx h = H_fn(&specs[l - 1], w);
  return h * h / (H_fn(prev, w) * H_fn(next, w));
}

cplx cauchy_det(const cvec& W, const cvec& Wp) {
  int n = int(W.size());
  if (int(Wp.size()) != n) throw Error(Err::InvalidArgument, "Cauchy determinant needs equal sizes");
  if (n == 0) return 1.0;
  if (n == 1) return 1.0 / (W[0] - Wp[0]);
  Eigen::MatrixXcd C(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) C(i, j) = 1.0 / (W[i] - Wp[j]);
  return C.partialPivLu().determinant();
}

cplx cauchy_closed(const cvec& W, const cvec& Wp) {
  int n = int(W.size());
  cplx num = 1.0, den = 1.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) num *= (W[j] - W[i]) * (Wp[j] - Wp[i]);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) den *= W[i] - Wp[j];
  return ((n * (n - 1) / 2) % 2 ? -1.0 : 1.0) * num / den;
}

namespace {

// everything about one z that the integrand needs
struct Node {
  BetheSpectrum s;
  cplx log_pl = 0, log_pr = 0, log_d = 0;  // log prod(-u)^N, log prod(v+1)^(L-N), log Delta(R;L)
  cplx det_part = 0;                       // E(z) prod(-u)^N prod(v+1)^(L-N) / Delta(R;L), first level only
  Eigen::MatrixXcd P;                      // pch(v_i, u_j) on the roots, first level
};

Node make_node(const InitialConfig& Y, BetheSpectrum s, int l, const QuadConfig& cfg) {
  Node n;
  n.s = std::move(s);
  int N = Y.p.N, L = Y.p.L;
  n.log_pl = log_prod_left(n.s, N);
  n.log_pr = log_prod_right_p1(n.s, L - N);
  n.log_d = log_delta2(n.s.right, n.s.left);
  if (l != 0) return n;
  if (cfg.fredholm_energy)
    n.det_part = energy_fredholm(Y, n.s).det;
  else
    n.det_part = energy_direct(Y, n.s) * std::exp(n.log_pl + n.log_pr - n.log_d);
  n.P.resize(N, L - N);
  PchHitOptions po;
  po.tol = cfg.dp_tol;
  for (int j = 0; j < L - N; ++j) {
    cvec c = pch_hitting_multi(Y, n.s, n.s.right, n.s.left[j], po);
    for (int i = 0; i < N; ++i) n.P(i, j) = c[i];
  }
  return n;
}

cplx c_nodes(const InitialConfig& Y, const std::vector<const Node*>& nd, const std::vector<ObsPoint>& pts) {
  int m = int(nd.size());
  int N = Y.p.N, L = Y.p.L;
  cplx lg = std::log(nd[0]->det_part);
  for (int l = 1; l <= m; ++l) {
    const Node& n = *nd[l - 1];
    ObsPoint prev{0, 0, 0};
    if (l > 1) prev = pts[l - 2];
    long long dk = pts[l - 1].k - prev.k, da = pts[l - 1].a - prev.a;
    double dt = pts[l - 1].t - prev.t;
    cplx sv = 0;
    for (auto v : n.s.right) sv += v;
    // prod (-u)^{-k}: with +k the constant term picks up the negative powers of zz that appear once
    // a - y_k > L - N, and the answer is wrong there
    lg += log_prod_left(n.s, double(-dk)) + log_prod_right_p1(n.s, double(-da - dk)) + dt * sv;
    if (l >= 2) {
      const Node& q = *nd[l - 2];
      lg += n.log_pl + n.log_pr - n.log_d;
      lg += std::log(q.s.zL / (q.s.zL - n.s.zL));
      lg += log_delta2(n.s.right, q.s.left) - q.log_pl - log_prod_right_p1(n.s, L - N);
    }
  }
  return std::exp(lg);
}

std::vector<std::vector<int>> combos(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  std::function<void(int)> go = [&](int start) {
    if (int(cur.size()) == k) {
      out.push_back(cur);
      return;
    }
    for (int i = start; i < n; ++i) {
      cur.push_back(i);
      go(i + 1);
      cur.pop_back();
    }
  };
  go(0);
  return out;
}

struct DCtx {
  int m = 0;
  std::vector<const Node*> nd;
  std::vector<cvec> wl, wr;  // J f g on left/right roots per level
  std::vector<cplx> pre;     // (1 - zL_{l+1}/zL_l), (1 - zL_l/zL_{l+1})
  std::vector<cplx> post;
};

DCtx make_ctx(const InitialConfig& Y, const std::vector<const Node*>& nd, const std::vector<ObsPoint>& pts) {
  DCtx c;
  c.m = int(nd.size());
  c.nd = nd;
  std::vector<BetheSpectrum> specs;
  for (auto n : nd) specs.push_back(n->s);
  c.wl.resize(c.m);
  c.wr.resize(c.m);
  for (int l = 1; l <= c.m; ++l) {
    const auto& s = nd[l - 1]->s;
    for (auto u : s.left) c.wl[l - 1].push_back(J_fn(Y.p, u) * f_fn(pts, l, u, Y.p.rho) * g_fn(specs, l, u));
    for (auto v : s.right) c.wr[l - 1].push_back(J_fn(Y.p, v) * f_fn(pts, l, v, Y.p.rho) * g_fn(specs, l, v));
  }
  for (int l = 0; l + 1 < c.m; ++l) {
    c.pre.push_back(1.0 - nd[l + 1]->s.zL / nd[l]->s.zL);
    c.post.push_back(1.0 - nd[l]->s.zL / nd[l + 1]->s.zL);
  }
  return c;
}

// sum over root subsets for a fixed n (equals D^(n) / prod (n_l!)^2)
cplx d_subsets(const DCtx& c, const std::vector<int>& n) {
  int m = c.m;
  cplx pref = 1.0;
  for (int l = 0; l + 1 < m; ++l) pref *= ipow(c.pre[l], n[l]) * ipow(c.post[l], n[l + 1]);
  // sign that makes the n_{l+1} = 0 terms agree with the m = 1 series
  for (int l = 0; l + 1 < m; ++l)
    if (n[l] % 2) pref = -pref;
  std::vector<std::vector<std::vector<int>>> cl(m), cr(m);
  for (int l = 0; l < m; ++l) {
    cl[l] = combos(int(c.wl[l].size()), n[l]);
    cr[l] = combos(int(c.wr[l].size()), n[l]);
    if (cl[l].empty() || cr[l].empty()) return 0.0;
  }
  std::vector<const std::vector<int>*> su(m), sv(m);
  cplx total = 0;
  std::function<void(int)> go = [&](int l) {
    if (l == m) {
      cplx w = 1.0;
      std::vector<cvec> U(m), V(m);
      for (int k = 0; k < m; ++k) {
        for (int i : *su[k]) {
          w *= c.wl[k][i];
          U[k].push_back(c.nd[k]->s.left[i]);
        }
        for (int i : *sv[k]) {
          w *= c.wr[k][i];
          V[k].push_back(c.nd[k]->s.right[i]);
        }
      }
      int n1 = n[0];
      cplx dp = 1.0;
      if (n1 > 0) {
        Eigen::MatrixXcd A(n1, n1);
        for (int i = 0; i < n1; ++i)
          for (int j = 0; j < n1; ++j) A(i, j) = c.nd[0]->P((*sv[0])[i], (*su[0])[j]);
        dp = n1 == 1 ? A(0, 0) : A.partialPivLu().determinant();
      }
      cplx cd = 1.0;
      for (int k = 0; k + 1 < m; ++k) {
        cvec a = U[k], b = V[k];
        a.insert(a.end(), V[k + 1].begin(), V[k + 1].end());
        b.insert(b.end(), U[k + 1].begin(), U[k + 1].end());
        cd *= cauchy_det(a, b);
      }
      cd *= cauchy_det(V[m - 1], U[m - 1]);
      total += w * dp * cd;
      return;
    }
    for (auto& a : cl[l])
      for (auto& b : cr[l]) {
        su[l] = &a;
        sv[l] = &b;
        go(l + 1);
      }
  };
  go(0);
  return pref * total;
}

double factorial(int n) {
  double f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

DSeries d_nodes(const InitialConfig& Y, const std::vector<const Node*>& nd, const std::vector<ObsPoint>& pts,
                const QuadConfig& cfg) {
  DCtx c = make_ctx(Y, nd, pts);
  int m = c.m;
  int nmax = std::min(Y.p.N, Y.p.L - Y.p.N);
  int cap = std::min(cfg.series_cap, nmax);
  DSeries out;
  out.level.assign(m * cap + 1, 0.0);
  std::vector<cplx> lev(m * cap + 1, 0.0);
  cplx edge = 0;
  std::vector<int> n(m, 0);
  std::function<void(int)> go = [&](int l) {
    if (l == m) {
      cplx t = d_subsets(c, n);
      int s = 0, mx = 0;
      for (int x : n) {
        s += x;
        mx = std::max(mx, x);
      }
      lev[s] += t;
      if (mx == cap) edge += t;
      return;
    }
    for (int k = 0; k <= cap; ++k) {
      n[l] = k;
      go(l + 1);
    }
  };
  go(0);
  out.value = 0;
  for (size_t s = 0; s < lev.size(); ++s) {
    out.value += lev[s];
    out.level[s] = std::abs(lev[s]);
  }
  if (cap < nmax) {
    out.tail = std::abs(edge);
    if (cap >= 2 && out.level[cap] > out.level[cap - 1])
      throw Error(Err::SeriesNotConverged, "D-series terms are not decreasing at the cap");
  }
  return out;
}

std::vector<Node> nodes_for(const InitialConfig& Y, const std::vector<BetheSpectrum>& specs,
                            const QuadConfig& cfg) {
  std::vector<Node> v;
  for (size_t l = 0; l < specs.size(); ++l) v.push_back(make_node(Y, specs[l], int(l), cfg));
  return v;
}

std::vector<const Node*> ptrs(const std::vector<Node>& v) {
  std::vector<const Node*> p;
  for (auto& n : v) p.push_back(&n);
  return p;
}

}  // namespace

cplx script_c(const InitialConfig& Y, const std::vector<BetheSpectrum>& specs, const std::vector<ObsPoint>& pts,
              const QuadConfig& cfg) {
  if (specs.size() != pts.size() || specs.empty()) throw Error(Err::InvalidArgument, "need one spectrum per point");
  const QuadConfig& c = cfg;
  std::vector<Node> nd;
  for (size_t l = 0; l < specs.size(); ++l) {
    Node n;
    n.s = specs[l];
    int N = Y.p.N, L = Y.p.L;
    n.log_pl = log_prod_left(n.s, N);
    n.log_pr = log_prod_right_p1(n.s, L - N);
    n.log_d = log_delta2(n.s.right, n.s.left);
    if (l == 0)
      n.det_part = c.fredholm_energy ? energy_fredholm(Y, n.s).det
                                     : energy_direct(Y, n.s) * std::exp(n.log_pl + n.log_pr - n.log_d);
    nd.push_back(std::move(n));
  }
  return c_nodes(Y, ptrs(nd), pts);
}

cplx script_d_term(const InitialConfig& Y, const std::vector<BetheSpectrum>& specs, const std::vector<ObsPoint>& pts,
                   const std::vector<int>& n, const QuadConfig& cfg) {
  if (specs.size() != pts.size() || n.size() != pts.size()) throw Error(Err::InvalidArgument, "size mismatch");
  auto nd = nodes_for(Y, specs, cfg);
  DCtx c = make_ctx(Y, ptrs(nd), pts);
  double mult = 1;
  for (int x : n) mult *= factorial(x) * factorial(x);
  return mult * d_subsets(c, n);
}

DSeries script_d(const InitialConfig& Y, const std::vector<BetheSpectrum>& specs, const std::vector<ObsPoint>& pts,
                 const QuadConfig& cfg) {
  if (specs.size() != pts.size()) throw Error(Err::InvalidArgument, "size mismatch");
  if (cfg.series_cap <= 0) return DSeries{1.0, 0, {1.0}};
  auto nd = nodes_for(Y, specs, cfg);
  return d_nodes(Y, ptrs(nd), pts, cfg);
}

DistResult multipoint_prob(const InitialConfig& Y, const std::vector<ObsPoint>& pts, const QuadConfig& cfg) {
  int m = int(pts.size());
  if (m < 1 || m > 2) throw Error(Err::InvalidArgument, "m must be 1 or 2");
  for (int i = 1; i < m; ++i)
    if (pts[i].t < pts[i - 1].t) throw Error(Err::InvalidArgument, "times must be nondecreasing");
  std::vector<double> fr = cfg.fractions;
  if (fr.empty()) fr = m == 1 ? std::vector<double>{0.6} : std::vector<double>{0.6, 0.4};
  if (int(fr.size()) != m) throw Error(Err::InvalidArgument, "one radius fraction per point");
  for (int i = 0; i < m; ++i) {
    if (!(fr[i] > 0 && fr[i] < 1)) throw Error(Err::InvalidArgument, "fractions must lie in (0,1)");
    if (i && !(fr[i] < fr[i - 1])) throw Error(Err::InvalidArgument, "fractions must be strictly decreasing");
  }
  const RingParams& p = Y.p;
  BetheOptions bo;
  bo.margin = 1e-3;
  const double phase0 = 0.1234567;
  // node j of level l on a grid of size G
  auto point = [&](int l, int j, int G) -> std::pair<cplx, cplx> {  // (spectrum parameter, measure weight)
    double th = phase0 + 2 * PI * j / G;
    if (cfg.literal_measure) {
      cplx z = std::polar(std::pow(fr[l], 1.0 / p.L) * p.r0, th);
      return {z, z};
    }
    return {std::polar(fr[l], th), 1.0};
  };
  auto build = [&](int l, int j, int G) {
    auto [x, w] = point(l, j, G);
    BetheSpectrum s = cfg.literal_measure ? solve_bethe(p, x, bo) : solve_bethe_zz(p, x, bo);
    return make_node(Y, std::move(s), l, cfg);
  };
  int G = cfg.nodes;
  std::vector<std::vector<Node>> nodes(m);
  for (int l = 0; l < m; ++l) {
    nodes[l].resize(G);
    parallel_for(G, [&](size_t j) { nodes[l][j] = build(l, int(j), G); });
  }
  double tail_max = 0, peak = 0;
  std::mutex mu;
  auto integrate = [&](int Gc) {
    size_t total = 1;
    for (int l = 0; l < m; ++l) total *= Gc;
    std::vector<cplx> vals(total);
    std::vector<double> tails(total);
    parallel_for(total, [&](size_t idx) {
      std::vector<const Node*> nd(m);
      cplx w = 1.0;
      size_t r = idx;
      for (int l = 0; l < m; ++l) {
        int j = int(r % Gc);
        r /= Gc;
        nd[l] = &nodes[l][j];
        w *= point(l, j, Gc).second;
      }
      DSeries D = d_nodes(Y, nd, pts, cfg);
      vals[idx] = w * c_nodes(Y, nd, pts) * D.value;
      tails[idx] = D.tail;
    });
    cplx s = 0;
    for (auto v : vals) s += v;
    {
      std::lock_guard<std::mutex> g(mu);
      for (double t : tails) tail_max = std::max(tail_max, t);
      for (auto v : vals) peak = std::max(peak, std::abs(v));
    }
    return s / double(total);
  };
  cplx I = integrate(G);
  DistResult out;
  out.quad_change = std::numeric_limits<double>::infinity();
  out.literal_measure = cfg.literal_measure;
  for (;;) {
    if (2 * G > cfg.nodes_cap)
      throw Error(Err::QuadratureStall, "zz-quadrature did not settle to quad_tol; the integrand peak is " +
                                            std::to_string(peak) + ", so rounding alone leaves about 1e-14 of that");
    // refine: old nodes go to even slots
    for (int l = 0; l < m; ++l) {
      std::vector<Node> nn(2 * G);
      for (int j = 0; j < G; ++j) nn[2 * j] = std::move(nodes[l][j]);
      parallel_for(G, [&](size_t j) { nn[2 * j + 1] = build(l, int(2 * j + 1), 2 * G); });
      nodes[l].swap(nn);
    }
    G *= 2;
    cplx I2 = integrate(G);
    out.quad_change = std::abs(I2 - I);
    I = I2;
    if (out.quad_change <= cfg.quad_tol) break;
  }
  out.prob = I.real();
  out.imag = I.imag();
  out.series_tail = tail_max;
  out.nodes = G;
  out.peak = peak;
  return out;
}

}  // namespace pkpz
