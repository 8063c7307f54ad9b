// Multi-start ascent for sup_{||g||_{p'} <= 1} |sum_j c_j <w_j, g>^k| over the
// (block-)l_{p'} unit ball, plus the Hölder-path node search and the dense
// full-injective alternating maximization.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "bmc/error.hpp"
#include "bmc/kernels.hpp"
#include "bmc/tensor.hpp"

namespace bmc {

namespace {

double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

double block_norm(const double* x, std::size_t block) {
  if (block == 1) return std::fabs(x[0]);
  return std::sqrt(kernels::active().sum_sq(x, block));
}

// Maximizer of <x, g> over the unit ball of the dual of l_r (blocks of l_2):
// out_B = (|x_B| / |x|_r)^{r-1} x_B / |x_B|. Returns |x|_r.
double dual_map(std::span<const double> x, double r, std::size_t block, std::span<double> out) {
  double nx = coords_norm(x, r, block);
  std::fill(out.begin(), out.end(), 0.0);
  if (nx == 0.0) return 0.0;
  for (std::size_t i = 0; i < x.size(); i += block) {
    double bn = block_norm(x.data() + i, block);
    if (bn == 0.0) continue;
    double s = (r == 1.0 ? 1.0 : std::pow(bn / nx, r - 1.0)) / bn;
    for (std::size_t c = 0; c < block; ++c) out[i + c] = s * x[i + c];
  }
  return nx;
}

void project_box(std::span<double> g, std::size_t block) {
  if (block == 1) {
    for (double& x : g) x = std::clamp(x, -1.0, 1.0);
    return;
  }
  for (std::size_t i = 0; i < g.size(); i += block) {
    double bn = block_norm(g.data() + i, block);
    if (bn > 1.0)
      for (std::size_t c = 0; c < block; ++c) g[i + c] /= bn;
  }
}

// F(g) = sum_j c_j <w_j, g>^k either from the term matrix or from a dense
// symmetric coefficient tensor, whichever is cheaper.
class Objective {
 public:
  Objective(const double* W, std::size_t rows, std::size_t cols, const double* c, int k)
      : W_(W), rows_(rows), cols_(cols), c_(c), k_(k) {
    double dense_size = std::pow(double(cols), k);
    if (k >= 2 && dense_size <= 1e5 && dense_size < double(rows) * double(cols)) build_dense();
    z_.resize(rows_);
    wz_.resize(rows_);
  }

  std::size_t cols() const { return cols_; }

  // Returns F(g); writes grad F into G.
  double eval(std::span<const double> g, std::span<double> G) {
    const auto& K = kernels::active();
    if (!dense_.empty()) {
      cur_.assign(dense_.begin(), dense_.end());
      std::size_t len = cur_.size();
      for (int m = 0; m + 1 < k_; ++m) {
        std::size_t outer = len / cols_;
        nxt_.resize(outer);
        K.gemv(cur_.data(), outer, cols_, g.data(), nxt_.data());
        cur_.swap(nxt_);
        len = outer;
      }
      for (std::size_t i = 0; i < cols_; ++i) G[i] = double(k_) * cur_[i];
      return K.dot(cur_.data(), g.data(), cols_);
    }
    K.gemv(W_, rows_, cols_, g.data(), z_.data());
    double F = 0.0;
    for (std::size_t j = 0; j < rows_; ++j) {
      double zk1 = ipow(z_[j], k_ - 1);
      F += c_[j] * zk1 * z_[j];
      wz_[j] = double(k_) * c_[j] * zk1;
    }
    K.gemv_t(W_, rows_, cols_, wz_.data(), G.data());
    return F;
  }

  double value(std::span<const double> g) {
    tmp_.resize(cols_);
    return eval(g, tmp_);
  }

 private:
  void build_dense() {
    std::size_t total = 1;
    for (int m = 0; m < k_; ++m) total *= cols_;
    dense_.assign(total, 0.0);
    std::vector<double> cur, next;
    for (std::size_t j = 0; j < rows_; ++j) {
      const double* w = W_ + j * cols_;
      cur.assign(1, c_[j]);
      for (int m = 0; m < k_; ++m) {
        next.resize(cur.size() * cols_);
        for (std::size_t a = 0; a < cur.size(); ++a)
          for (std::size_t b = 0; b < cols_; ++b) next[a * cols_ + b] = cur[a] * w[b];
        cur.swap(next);
      }
      kernels::active().axpy(1.0, cur.data(), dense_.data(), total);
    }
  }

  const double* W_;
  std::size_t rows_, cols_;
  const double* c_;
  int k_;
  std::vector<double> dense_, cur_, nxt_, z_, wz_, tmp_;
};

struct RunResult {
  double value = -std::numeric_limits<double>::infinity();
  std::vector<double> g;
  bool converged = false;
};

// Maximizes s*F from g0 (normalized to the unit sphere of the block-l_{p'} norm).
RunResult ascend(Objective& obj, std::vector<double> g, double s, double p_dual, std::size_t block,
                 const AscentOptions& opts) {
  const std::size_t n = obj.cols();
  const bool box = std::isinf(p_dual);
  const double p = box ? 1.0 : p_dual / (p_dual - 1.0);
  std::vector<double> G(n), Gn(n), gn(n), J(n), h(n);

  if (box) {
    project_box(g, block);
  } else {
    double ng = coords_norm(g, p_dual, block);
    if (ng > 0.0)
      for (double& x : g) x /= ng;
  }
  double val = s * obj.eval(g, G);
  for (double& x : G) x *= s;

  RunResult out;
  double alpha = 0.0, step = 1.0;
  int stalled = 0;  // consecutive power steps with relative gain below 1e-15
  for (int it = 0; it < opts.max_iters; ++it) {
    double res;
    if (box) {
      double gmax = kernels::max_abs(G);
      if (gmax == 0.0) {
        out.converged = true;
        break;
      }
      for (std::size_t i = 0; i < n; ++i) h[i] = g[i] + G[i] / gmax;
      project_box(h, block);
      res = 0.0;
      for (std::size_t i = 0; i < n; ++i) res = std::max(res, std::fabs(h[i] - g[i]));
    } else {
      dual_map(g, p_dual, block, J);
      double mu = kernels::dot(G, g);
      for (std::size_t i = 0; i < n; ++i) h[i] = G[i] - mu * J[i];
      double gn_p = coords_norm(G, p, block);
      res = gn_p > 0.0 ? coords_norm(h, p, block) / gn_p : 0.0;
    }
    if (res < opts.grad_tol) {
      out.converged = true;
      break;
    }

    bool accepted = false;
    const double slack = 4.0 * std::numeric_limits<double>::epsilon() * std::fabs(val);
    for (int tries = 0; tries < 60 && !accepted; ++tries) {
      if (box) {
        double gmax = kernels::max_abs(G);
        for (std::size_t i = 0; i < n; ++i) gn[i] = g[i] + step * G[i] / gmax;
        project_box(gn, block);
      } else {
        double gp = coords_norm(G, p, block);
        for (std::size_t i = 0; i < n; ++i) h[i] = G[i] + alpha * gp * J[i];
        dual_map(h, p, block, gn);
      }
      double vn = s * obj.eval(gn, Gn);
      if (vn >= val - slack && vn > -std::numeric_limits<double>::infinity()) {
        accepted = true;
        g.swap(gn);
        for (std::size_t i = 0; i < n; ++i) G[i] = s * Gn[i];
        bool improved = vn > val;
        stalled = (!box && vn - val <= 1e-15 * std::fabs(vn)) ? stalled + 1 : 0;
        val = vn;
        if (box) step = std::min(step * 2.0, 1e6);
        else alpha = alpha < 1e-3 ? 0.0 : alpha * 0.25;
        if (!improved && box && res < 1e-14) break;
      } else {
        if (box) step *= 0.5;
        else alpha = alpha == 0.0 ? 1.0 : alpha * 4.0;
      }
    }
    if (!accepted) break;
    // The value error is second order in the residual, so a value that no
    // longer moves is converged even when the residual decays slowly.
    if (stalled >= 5) {
      out.converged = true;
      break;
    }
  }
  out.value = val;
  out.g = std::move(g);
  return out;
}

struct EngineResult {
  double value = 0.0;
  std::vector<double> g;
  bool converged = false;
};

EngineResult run_engine(const double* W, std::size_t rows, std::size_t cols, const double* c, int k,
                        double p_dual, std::size_t block, const AscentOptions& opts) {
  Objective obj(W, rows, cols, c, k);
  const double p = std::isinf(p_dual) ? 1.0 : p_dual / (p_dual - 1.0);

  std::vector<std::vector<double>> starts;
  const int R = std::max(1, opts.restarts);
  // (a) norming directions of the heaviest terms
  std::vector<std::size_t> order(rows);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> mass(rows);
  for (std::size_t j = 0; j < rows; ++j)
    mass[j] = std::fabs(c[j]) * std::pow(coords_norm({W + j * cols, cols}, p, block), k);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return mass[a] > mass[b]; });
  const int from_terms = std::min<int>(int(rows), (R + 1) / 2);
  for (int r = 0; r < from_terms; ++r) {
    std::vector<double> g(cols);
    std::span<const double> w(W + order[r] * cols, cols);
    if (std::isinf(p_dual)) {
      for (std::size_t i = 0; i < cols; i += block) {
        double bn = block_norm(w.data() + i, block);
        for (std::size_t q = 0; q < block; ++q) g[i + q] = bn > 0.0 ? w[i + q] / bn : 0.0;
      }
    } else {
      dual_map(w, p, block, g);
    }
    if (kernels::max_abs(g) > 0.0) starts.push_back(std::move(g));
  }
  // (b) random Gaussian directions
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> nd;
  while (int(starts.size()) < R) {
    std::vector<double> g(cols);
    for (double& x : g) x = nd(rng);
    starts.push_back(std::move(g));
  }

  EngineResult best;
  best.value = -1.0;
  for (const auto& g0 : starts) {
    for (double s : {1.0, -1.0}) {
      RunResult rr = ascend(obj, g0, s, p_dual, block, opts);
      if (rr.value > best.value) {
        best.value = rr.value;
        best.g = std::move(rr.g);
        best.converged = rr.converged;
      }
    }
  }
  return best;
}

// ---- Hölder paths ---------------------------------------------------------

struct HolderCandidate {
  std::size_t t = 0, s = 1, u = 0;
  bool use_diff = false;
};

InjectiveResult holder_injective(const SymmetricTensorRep& U, const AscentOptions& opts) {
  const auto& sp = U.space();
  const std::size_t n = sp.grid.size(), d = sp.value_dim, R = U.rank();
  const int k = U.k();
  const bool has_diff = sp.delta > 0.0;
  auto c = U.weights();
  auto X = U.matrix();

  auto invpow = [&](std::size_t s, std::size_t u) { return std::pow(std::fabs(sp.grid[s] - sp.grid[u]), -sp.delta); };

  // Per-node score using coordinate directions: |sum_j c_j x_j(t)_comp^k|.
  auto node_score = [&](std::size_t t) {
    double best = 0.0;
    for (std::size_t q = 0; q < d; ++q) {
      double acc = 0.0;
      for (std::size_t j = 0; j < R; ++j) acc += c[j] * ipow(X[j * sp.dimension() + t * d + q], k);
      best = std::max(best, std::fabs(acc));
    }
    return best;
  };
  auto pair_score = [&](std::size_t s, std::size_t u) {
    double w = invpow(s, u), best = 0.0;
    for (std::size_t q = 0; q < d; ++q) {
      double acc = 0.0;
      for (std::size_t j = 0; j < R; ++j) {
        const double* x = X.data() + j * sp.dimension();
        acc += c[j] * ipow(w * (x[s * d + q] - x[u * d + q]), k);
      }
      best = std::max(best, std::fabs(acc));
    }
    return best;
  };

  // Builds the 2d-dimensional coordinates (x_j(t), D_{s,u} x_j) and runs the
  // box/disc ascent over the two direction blocks.
  std::vector<double> W2(R * 2 * d);
  auto refine = [&](const HolderCandidate& cand, std::vector<double>& g_out) {
    double w = cand.use_diff ? invpow(cand.s, cand.u) : 0.0;
    for (std::size_t j = 0; j < R; ++j) {
      const double* x = X.data() + j * sp.dimension();
      for (std::size_t q = 0; q < d; ++q) {
        W2[j * 2 * d + q] = x[cand.t * d + q];
        W2[j * 2 * d + d + q] = cand.use_diff ? w * (x[cand.s * d + q] - x[cand.u * d + q]) : 0.0;
      }
    }
    AscentOptions o = opts;
    o.restarts = std::min(opts.restarts, 8);
    auto er = run_engine(W2.data(), R, 2 * d, c.data(), k, std::numeric_limits<double>::infinity(), d, o);
    g_out = er.g;
    return er.value;
  };

  // Node search: best single node, then best pair, then alternate.
  HolderCandidate cand;
  std::vector<double> nscore(n);
  for (std::size_t t = 0; t < n; ++t) nscore[t] = node_score(t);
  cand.t = std::size_t(std::max_element(nscore.begin(), nscore.end()) - nscore.begin());

  if (has_diff) {
    const double budget = 2e8;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    if (double(n) * double(n) * double(R) * double(d) <= budget) {
      for (std::size_t u = 0; u < n; ++u)
        for (std::size_t s = u + 1; s < n; ++s) pairs.emplace_back(s, u);
    } else {
      // dyadic gaps everywhere plus all pairs among the strongest nodes
      for (std::size_t gap = 1; gap < n; gap *= 2)
        for (std::size_t u = 0; u + gap < n; ++u) pairs.emplace_back(u + gap, u);
      std::vector<std::size_t> idx(n);
      std::iota(idx.begin(), idx.end(), 0);
      std::size_t top = std::min<std::size_t>(n, 64);
      std::partial_sort(idx.begin(), idx.begin() + top, idx.end(),
                        [&](auto a, auto b) { return nscore[a] > nscore[b]; });
      for (std::size_t a = 0; a < top; ++a)
        for (std::size_t b = a + 1; b < top; ++b)
          pairs.emplace_back(std::max(idx[a], idx[b]), std::min(idx[a], idx[b]));
    }
    double best = -1.0;
    for (auto [s, u] : pairs) {
      double v = pair_score(s, u);
      if (v > best) {
        best = v;
        cand.s = s;
        cand.u = u;
      }
    }
    cand.use_diff = true;
  }

  std::vector<double> g;
  double val = refine(cand, g);
  // Alternate: move t with (s,u) fixed, then (s,u) along dyadic gaps with t fixed.
  for (int round = 0; round < 4; ++round) {
    bool improved = false;
    for (std::size_t t = 0; t < n; ++t) {
      if (t == cand.t) continue;
      HolderCandidate c2 = cand;
      c2.t = t;
      // cheap screen: evaluate at the current directions before refining
      double acc = 0.0;
      double w = c2.use_diff ? invpow(c2.s, c2.u) : 0.0;
      for (std::size_t j = 0; j < R; ++j) {
        const double* x = X.data() + j * sp.dimension();
        double z = 0.0;
        for (std::size_t q = 0; q < d; ++q) {
          z += g[q] * x[t * d + q];
          if (c2.use_diff) z += g[d + q] * w * (x[c2.s * d + q] - x[c2.u * d + q]);
        }
        acc += c[j] * ipow(z, k);
      }
      if (std::fabs(acc) > val * (1.0 + 1e-12)) {
        std::vector<double> g2;
        double v2 = refine(c2, g2);
        if (v2 > val) {
          val = v2;
          g = std::move(g2);
          cand = c2;
          improved = true;
        }
      }
    }
    if (!improved) break;
  }

  HolderAtom atom;
  atom.t = cand.t;
  atom.s = cand.s;
  atom.u = cand.u;
  std::vector<double> dirs(2 * d, 0.0);
  double n1 = std::sqrt(kernels::sum_sq({g.data(), d}));
  double n2 = std::sqrt(kernels::sum_sq({g.data() + d, d}));
  atom.a = n1;
  atom.b = cand.use_diff ? n2 : 0.0;
  for (std::size_t q = 0; q < d; ++q) {
    dirs[q] = n1 > 0.0 ? g[q] / n1 : (q == 0 ? 1.0 : 0.0);
    dirs[d + q] = n2 > 0.0 ? g[d + q] / n2 : (q == 0 ? 1.0 : 0.0);
  }
  if (!has_diff && atom.s == atom.u) atom.s = atom.u + 1;
  InjectiveResult res;
  res.certificate = project_to_dual_ball(DualFunctional(U.space_ptr(), atom, std::move(dirs)));
  double F = 0.0;
  for (std::size_t j = 0; j < R; ++j) F += c[j] * ipow(dual_pair(res.certificate, U.term(j)), k);
  res.value = std::fabs(F);
  res.converged = true;
  res.restarts = opts.restarts;
  return res;
}

}  // namespace

InjectiveResult injective_norm(const SymmetricTensorRep& U, const AscentOptions& opts) {
  InjectiveResult res;
  if (U.empty()) return res;
  const auto& sp = U.space();
  const int k = U.k();

  if (k == 1) {
    std::vector<double> sum(U.dim(), 0.0);
    for (std::size_t j = 0; j < U.rank(); ++j)
      kernels::active().axpy(U.weight(j), U.vector(j).data(), sum.data(), sum.size());
    // Exact cancellation at constrained nodes keeps the invariants intact.
    BanachVector v(U.space_ptr(), std::move(sum));
    res.value = norm(v);
    res.certificate = norming_functional(v);
    res.exact = true;
    res.converged = true;
    return res;
  }

  if (sp.kind == SpaceKind::HolderPath) return holder_injective(U, opts);

  const std::size_t cols = sp.coord_dim(), rows = U.rank();
  std::vector<double> W(rows * cols);
  for (std::size_t j = 0; j < rows; ++j) to_coords(sp, U.vector(j), {W.data() + j * cols, cols});
  auto er = run_engine(W.data(), rows, cols, U.weights().data(), k, sp.dual_exponent(), sp.block_size(), opts);

  res.certificate = project_to_dual_ball(DualFunctional(U.space_ptr(), std::move(er.g)));
  double F = 0.0;
  auto g = res.certificate.rep();
  for (std::size_t j = 0; j < rows; ++j) F += U.weight(j) * ipow(kernels::dot(g, {W.data() + j * cols, cols}), k);
  res.value = std::fabs(F);
  res.converged = er.converged;
  res.restarts = opts.restarts;
  return res;
}

double full_injective_norm_dense(const DenseTensor& T, double p, const AscentOptions& opts,
                                 std::span<const double> init) {
  require(p > 1.0 && std::isfinite(p), ErrorKind::Unsupported, "full injective norm needs 1 < p < inf");
  const int k = T.k();
  const std::size_t n = T.n();
  const double pd = p / (p - 1.0);

  // Contracts all modes except `skip` with the functionals in f.
  auto contract_except = [&](const std::vector<std::vector<double>>& f, int skip, std::vector<double>& out) {
    out.assign(n, 0.0);
    std::vector<std::size_t> idx(k);
    for (std::size_t off = 0; off < T.size(); ++off) {
      std::size_t r = off;
      for (int m = k - 1; m >= 0; --m) {
        idx[m] = r % n;
        r /= n;
      }
      double prod = T.entries()[off];
      if (prod == 0.0) continue;
      for (int m = 0; m < k; ++m)
        if (m != skip) prod *= f[m][idx[m]];
      out[idx[skip]] += prod;
    }
  };

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> nd;
  double best = 0.0;
  const int R = std::max(1, opts.restarts);
  std::vector<double> h;
  for (int r = 0; r < R; ++r) {
    std::vector<std::vector<double>> f(k, std::vector<double>(n));
    for (auto& v : f) {
      if (r == 0 && init.size() == n) std::copy(init.begin(), init.end(), v.begin());
      else
        for (double& x : v) x = nd(rng);
      double nv = coords_norm(v, pd, 1);
      if (nv > 0.0)
        for (double& x : v) x /= nv;
    }
    double val = 0.0;
    for (int it = 0; it < opts.max_iters; ++it) {
      double before = val;
      for (int m = 0; m < k; ++m) {
        contract_except(f, m, h);
        val = dual_map(h, p, 1, f[m]);
      }
      if (val - before <= 1e-14 * std::max(1.0, val)) break;
    }
    best = std::max(best, val);
  }
  return best;
}

}  // namespace bmc
