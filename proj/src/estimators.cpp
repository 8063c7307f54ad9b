#include "bmc/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

#include "bmc/error.hpp"
#include "bmc/kernels.hpp"

namespace bmc {

namespace {

void snap_constraints(const SpaceDescriptor& s, std::span<double> v) {
  if (s.kind == SpaceKind::FemW1p1d && s.boundary != Boundary::None) {
    v.front() = 0.0;
    if (s.boundary == Boundary::DirichletAll) v.back() = 0.0;
  } else if (s.kind == SpaceKind::FemW1p2d && s.boundary == Boundary::DirichletAll) {
    const std::size_t m = s.grid.size();
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t i = 0; i < m; ++i)
        if (i == 0 || j == 0 || i + 1 == m || j + 1 == m) v[j * m + i] = 0.0;
  }
}

// Coordinates of v (nodal coefficients in `from`) embedded into `target`.
std::vector<double> embed_coords(std::span<const double> v, const SpacePtr& from, const SpacePtr& target) {
  std::vector<double> out(target->coord_dim());
  if (same_space(*from, *target)) {
    to_coords(*target, v, out);
    return out;
  }
  std::vector<double> c(v.begin(), v.end());
  snap_constraints(*from, c);
  BanachVector bv(from, std::move(c));
  BanachVector pv = prolong(bv, target);
  to_coords(*target, pv.coeffs(), out);
  return out;
}

SpacePtr finer_of(const SpacePtr& a, const SpacePtr& b) { return a->dimension() >= b->dimension() ? a : b; }

// Streaming sum_j w_j v_j v_j^T, buffered into chunks of rank updates.
class GramAccumulator {
 public:
  explicit GramAccumulator(std::size_t n) : n_(n), G_(Eigen::MatrixXd::Zero(Eigen::Index(n), Eigen::Index(n))) {}

  void add(double w, std::span<const double> v) {
    if (w == 0.0) return;
    Eigen::MatrixXd& B = w > 0 ? pos_ : neg_;
    std::size_t& cnt = w > 0 ? np_ : nq_;
    if (B.cols() == 0) B.resize(Eigen::Index(n_), kChunk);
    const double s = std::sqrt(std::fabs(w));
    for (std::size_t i = 0; i < n_; ++i) B(Eigen::Index(i), Eigen::Index(cnt)) = s * v[i];
    if (++cnt == std::size_t(kChunk)) flush();
  }

  Eigen::MatrixXd finish() {
    flush();
    return Eigen::MatrixXd(G_.selfadjointView<Eigen::Lower>());
  }

 private:
  static constexpr Eigen::Index kChunk = 512;
  void flush() {
    if (np_) G_.selfadjointView<Eigen::Lower>().rankUpdate(pos_.leftCols(Eigen::Index(np_)), 1.0);
    if (nq_) G_.selfadjointView<Eigen::Lower>().rankUpdate(neg_.leftCols(Eigen::Index(nq_)), -1.0);
    np_ = nq_ = 0;
  }
  std::size_t n_, np_ = 0, nq_ = 0;
  Eigen::MatrixXd G_, pos_, neg_;
};

// Eigen-decomposition of a nodal Gram matrix as a rep with at most n terms.
SymmetricTensorRep compress_gram(const Eigen::MatrixXd& G, const SpacePtr& sp) {
  SymmetricTensorRep rep(2, sp);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  require(es.info() == Eigen::Success, ErrorKind::Numerical, "Gram eigen-compression failed");
  const double lmax = es.eigenvalues().size() ? es.eigenvalues().cwiseAbs().maxCoeff() : 0.0;
  std::vector<double> u(std::size_t(G.rows()));
  for (Eigen::Index i = es.eigenvalues().size(); i-- > 0;) {
    double l = es.eigenvalues()[i];
    if (l == 0.0 || std::fabs(l) <= 1e-15 * lmax) continue;
    for (std::size_t r = 0; r < u.size(); ++r) u[r] = es.eigenvectors()(Eigen::Index(r), i);
    snap_constraints(*sp, u);
    rep.add(l, u);
  }
  return rep;
}

}  // namespace

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::Analytic: return "analytic";
    case Provenance::Exhaustive: return "exhaustive";
    case Provenance::FineLevelAverage: return "fine-level-average";
  }
  return "?";
}

const char* to_string(NormKind k) {
  switch (k) {
    case NormKind::EpsS: return "eps_s";
    case NormKind::PiUpper: return "pi_upper";
    case NormKind::HilbertK2Exact: return "hilbert_k2_exact";
    case NormKind::HilbertK2Nuclear: return "hilbert_k2_nuclear";
  }
  return "?";
}

NormKind norm_kind_from_string(const std::string& s) {
  for (auto k : {NormKind::EpsS, NormKind::PiUpper, NormKind::HilbertK2Exact, NormKind::HilbertK2Nuclear})
    if (s == to_string(k)) return k;
  fail(ErrorKind::InvalidArgument, "unknown norm kind '" + s + "'");
}

std::size_t MomentEstimate::rank() const {
  std::size_t r = 0;
  for (const auto& l : levels) r += l.rank();
  return r;
}

SpacePtr MomentEstimate::finest_space() const {
  require(!levels.empty(), ErrorKind::InvalidArgument, "empty estimate");
  SpacePtr s = levels.front().space_ptr();
  for (const auto& l : levels) s = finer_of(s, l.space_ptr());
  return s;
}

SymmetricTensorRep MomentEstimate::flatten(const SpacePtr& target) const {
  SymmetricTensorRep out(k, target);
  out.reserve(rank());
  for (const auto& l : levels) {
    if (same_space(l.space(), *target)) {
      out.append(l);
      continue;
    }
    for (std::size_t j = 0; j < l.rank(); ++j) out.add(l.weight(j), prolong(l.term(j), target));
  }
  return out;
}

MomentEstimate mc_from_samples(int k, const std::vector<BanachVector>& samples) {
  require(!samples.empty(), ErrorKind::InvalidArgument, "MC needs M >= 1");
  std::size_t j = 0;
  return mc_kth_moment([&](const SeedSpec&) { return samples[j++]; }, k, samples.size(), SeedSpec{});
}

MomentEstimate mlmc_from_samples(int k, const std::vector<std::vector<CoupledSample>>& samples) {
  require(!samples.empty(), ErrorKind::InvalidArgument, "MLMC needs L >= 1");
  MomentEstimate est;
  est.k = k;
  for (std::size_t l = 0; l < samples.size(); ++l) {
    const auto& lev = samples[l];
    require(!lev.empty(), ErrorKind::InvalidArgument, "MLMC needs M_l >= 1 on every level");
    SymmetricTensorRep rep(k, lev.front().fine.space_ptr());
    rep.reserve(2 * lev.size());
    const double w = 1.0 / double(lev.size());
    for (const auto& s : lev) {
      rep.add(w, s.fine);
      if (l > 0) rep.add(-w, s.coarse);
      est.work_units += s.work_units;
    }
    rep.drop_small(1e-15);
    est.levels.push_back(std::move(rep));
    est.M.push_back(lev.size());
  }
  return est;
}

MomentEstimate mc_kth_moment(const Sampler& sampler, int k, std::size_t M, const SeedSpec& seed) {
  require(M >= 1, ErrorKind::InvalidArgument, "MC needs M >= 1");
  MomentEstimate est;
  est.k = k;
  est.M = {M};
  est.seed = seed;
  const double w = 1.0 / double(M);
  SymmetricTensorRep rep;
  std::vector<double> mean;  // k = 1 collapses to the sample mean
  for (std::size_t j = 0; j < M; ++j) {
    BanachVector x;
    try {
      x = sampler(seed.child(j));
    } catch (const Error& e) {
      fail(e.kind(), "sample " + std::to_string(j) + ": " + e.message());
    }
    if (j == 0) {
      rep = SymmetricTensorRep(k, x.space_ptr());
      if (k == 1) mean.assign(x.size(), 0.0);
      else rep.reserve(M);
    }
    require(same_space(x.space(), rep.space()), ErrorKind::SpaceMismatch, "MC samples from different spaces");
    if (k == 1) kernels::active().axpy(w, x.coeffs().data(), mean.data(), mean.size());
    else rep.add(w, x);
  }
  if (k == 1) rep.add(1.0, mean);
  est.levels.push_back(std::move(rep));
  return est;
}

MomentEstimate mlmc_estimate(const LevelHierarchy& model, int k, const std::vector<std::size_t>& M,
                             const SeedSpec& seed, bool compress) {
  require(!M.empty(), ErrorKind::InvalidArgument, "MLMC needs L >= 1");
  MomentEstimate est;
  est.k = k;
  est.seed = seed;
  for (std::size_t l = 1; l <= M.size(); ++l) {
    const std::size_t Ml = M[l - 1];
    require(Ml >= 1, ErrorKind::InvalidArgument, "MLMC needs M_l >= 1 on every level");
    SpacePtr sp = model.space(int(l));
    const bool gram = compress && k == 2 && Ml > 4 * sp->dimension();
    SymmetricTensorRep rep(k, sp);
    std::optional<GramAccumulator> acc;
    if (gram) acc.emplace(sp->dimension());
    else rep.reserve(2 * Ml);
    const double w = 1.0 / double(Ml);
    for (std::size_t j = 0; j < Ml; ++j) {
      CoupledSample s;
      try {
        s = model.sample(int(l), seed.child(l).child(j));
      } catch (const Error& e) {
        fail(e.kind(), "level " + std::to_string(l) + " sample " + std::to_string(j) + ": " + e.message());
      }
      if (gram) {
        acc->add(w, s.fine.coeffs());
        if (l > 1) acc->add(-w, s.coarse.coeffs());
      } else {
        rep.add(w, s.fine.coeffs());
        if (l > 1) rep.add(-w, s.coarse.coeffs());
      }
      est.work_units += s.work_units;
    }
    if (gram) rep = compress_gram(acc->finish(), sp);
    rep.drop_small(1e-15);
    est.levels.push_back(std::move(rep));
    est.M.push_back(Ml);
  }
  return est;
}

Eigen::MatrixXd nodal_gram(const SymmetricTensorRep& U) {
  require(U.k() == 2, ErrorKind::Unsupported, "Gram matrices need k = 2");
  const std::size_t n = U.dim();
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, n);
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  constexpr std::size_t kChunk = 1024;
  RowMat P, Q;
  for (std::size_t start = 0; start < U.rank(); start += kChunk) {
    std::size_t end = std::min(U.rank(), start + kChunk);
    std::size_t np = 0, nq = 0;
    for (std::size_t j = start; j < end; ++j) (U.weight(j) > 0 ? np : nq) += U.weight(j) != 0.0;
    P.resize(np, n);
    Q.resize(nq, n);
    std::size_t ip = 0, iq = 0;
    for (std::size_t j = start; j < end; ++j) {
      double c = U.weight(j);
      if (c == 0.0) continue;
      Eigen::Map<const Eigen::RowVectorXd> v(U.vector(j).data(), n);
      if (c > 0) P.row(ip++) = std::sqrt(c) * v;
      else Q.row(iq++) = std::sqrt(-c) * v;
    }
    if (np) G.selfadjointView<Eigen::Lower>().rankUpdate(P.transpose(), 1.0);
    if (nq) G.selfadjointView<Eigen::Lower>().rankUpdate(Q.transpose(), -1.0);
  }
  return Eigen::MatrixXd(G.selfadjointView<Eigen::Lower>());
}

Eigen::MatrixXd lift_gram_to_coords(const Eigen::MatrixXd& G, const SpacePtr& from, const SpacePtr& target) {
  const std::size_t n = from->dimension(), m = target->coord_dim();
  require(std::size_t(G.rows()) == n && std::size_t(G.cols()) == n, ErrorKind::DimensionMismatch,
          "Gram matrix does not match its space");
  if (from->kind == SpaceKind::SequenceLp && same_space(*from, *target)) return G;
  // B = L G (m x n), then C = B L^T = (L B^T)^T.
  Eigen::MatrixXd B(m, n), C(m, m);
  std::vector<double> col(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t r = 0; r < n; ++r) col[r] = G(r, i);
    auto e = embed_coords(col, from, target);
    for (std::size_t r = 0; r < m; ++r) B(r, i) = e[r];
  }
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t i = 0; i < n; ++i) col[i] = B(r, i);
    auto e = embed_coords(col, from, target);
    for (std::size_t c = 0; c < m; ++c) C(c, r) = e[c];
  }
  return 0.5 * (C + C.transpose());
}

ReferenceMoment reference_fine_average(const LevelHierarchy& model, int level, int k, std::size_t M,
                                       const SeedSpec& seed) {
  require(M >= 1, ErrorKind::InvalidArgument, "reference needs M >= 1");
  SpacePtr sp = model.space(level);
  const std::size_t n = sp->dimension();
  ReferenceMoment ref;
  ref.provenance = Provenance::FineLevelAverage;
  ref.note = "single-level average at level " + std::to_string(level) + " with M=" + std::to_string(M);
  ref.rep = SymmetricTensorRep(k, sp);
  auto draw = [&](std::size_t j) { return model.embed(model.solve_levels({level}, seed.child(j))[0], level); };

  if (k == 1) {
    std::vector<double> mean(n, 0.0);
    for (std::size_t j = 0; j < M; ++j) {
      auto v = draw(j);
      for (std::size_t i = 0; i < n; ++i) mean[i] += v[i] / double(M);
    }
    snap_constraints(*sp, mean);
    ref.rep.add(1.0, mean);
    return ref;
  }
  if (k != 2) {
    ref.rep.reserve(M);
    for (std::size_t j = 0; j < M; ++j) ref.rep.add(1.0 / double(M), draw(j));
    return ref;
  }
  // k = 2: streaming Gram accumulation, then eigen-compression.
  GramAccumulator acc(n);
  for (std::size_t j = 0; j < M; ++j) acc.add(1.0 / double(M), draw(j).coeffs());
  Eigen::MatrixXd G = acc.finish();
  ref.gram = lift_gram_to_coords(G, sp, sp);
  ref.rep = compress_gram(G, sp);
  return ref;
}

double error_in_norm(const MomentEstimate& est, const ReferenceMoment& ref, NormKind kind, const AscentOptions& opts) {
  require(est.k == ref.rep.k(), ErrorKind::InvalidArgument, "estimate and reference differ in k");
  SpacePtr target = finer_of(est.finest_space(), ref.rep.space_ptr());
  require(target->kind == ref.rep.space().kind, ErrorKind::SpaceMismatch, "estimate and reference spaces differ");

  if (kind == NormKind::HilbertK2Exact || kind == NormKind::HilbertK2Nuclear) {
    require(est.k == 2 && target->p == 2.0 && target->kind != SpaceKind::HolderPath, ErrorKind::Unsupported,
            "Hilbert oracles need k = 2 and p = 2");
    bool single_space = same_space(*target, ref.rep.space());
    for (const auto& l : est.levels) single_space = single_space && same_space(l.space(), *target);
    HilbertOracles h;
    if (single_space && target->kind == SpaceKind::SequenceLp) {
      // sparse-friendly path: block detection on the difference rep
      h = hilbert_k2_oracles(difference(est.flatten(target), ref.rep));
    } else {
      Eigen::MatrixXd A = Eigen::MatrixXd::Zero(target->coord_dim(), target->coord_dim());
      for (const auto& l : est.levels)
        if (!l.empty()) A += lift_gram_to_coords(nodal_gram(l), l.space_ptr(), target);
      if (same_space(ref.rep.space(), *target)) {
        if (!ref.gram) ref.gram = lift_gram_to_coords(nodal_gram(ref.rep), ref.rep.space_ptr(), target);
        A -= *ref.gram;
      } else {
        A -= lift_gram_to_coords(nodal_gram(ref.rep), ref.rep.space_ptr(), target);
      }
      h = symmetric_matrix_oracles(A);
    }
    return kind == NormKind::HilbertK2Exact ? h.spectral : h.nuclear;
  }

  SymmetricTensorRep ref_t = same_space(ref.rep.space(), *target) ? ref.rep : [&] {
    MomentEstimate tmp;
    tmp.k = ref.rep.k();
    tmp.levels.push_back(ref.rep);
    return tmp.flatten(target);
  }();
  SymmetricTensorRep diff = difference(est.flatten(target), ref_t);
  // For k = 1 every tensor norm is the norm of the summed vector.
  if (diff.k() == 1) return injective_norm(diff, opts).value;
  if (kind == NormKind::PiUpper) {
    // Cancelling repeated atoms keeps the bound valid and makes est = ref give 0.
    diff.merge_identical();
    return projective_norm_upper(diff);
  }
  return injective_norm(diff, opts).value;
}

LqError lq_error(const std::vector<double>& errors, double q, std::size_t resamples, std::uint64_t seed) {
  require(!errors.empty(), ErrorKind::InvalidArgument, "lq_error needs at least one run");
  require(q >= 1.0, ErrorKind::InvalidArgument, "lq_error needs q >= 1");
  auto stat = [&](const std::vector<double>& e) {
    double s = 0.0;
    for (double x : e) s += std::pow(std::fabs(x), q);
    return std::pow(s / double(e.size()), 1.0 / q);
  };
  LqError out;
  out.value = stat(errors);
  if (errors.size() < 2 || resamples < 2) return out;
  // Identical runs have no spread; resampling would only add rounding noise.
  if (std::all_of(errors.begin(), errors.end(), [&](double e) { return std::fabs(e) == std::fabs(errors[0]); }))
    return out;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, errors.size() - 1);
  std::vector<double> boot(errors.size()), reps(resamples);
  for (auto& r : reps) {
    for (auto& x : boot) x = errors[pick(rng)];
    r = stat(boot);
  }
  double m = 0.0;
  for (double r : reps) m += r;
  m /= double(resamples);
  double var = 0.0;
  for (double r : reps) var += (r - m) * (r - m);
  var /= double(resamples - 1);
  out.standard_error = std::sqrt(var);
  return out;
}

}  // namespace bmc
