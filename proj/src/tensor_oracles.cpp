#include <algorithm>
#include <cmath>
#include <numeric>

#include "bmc/error.hpp"
#include "bmc/tensor.hpp"

namespace bmc {

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

void check_hilbert_k2(const SymmetricTensorRep& U) {
  require(U.k() == 2, ErrorKind::Unsupported, "Hilbert oracles need k = 2");
  const auto& s = U.space();
  require(s.kind != SpaceKind::HolderPath, ErrorKind::Unsupported, "Hilbert oracles need a Hilbert space");
  require(s.p == 2.0, ErrorKind::Unsupported, "Hilbert oracles need p = 2");
}

// A += sum over the rows of W (rows x n, row-major) of c_j w_j w_j^T, in the
// lower triangle. Positive and negative weights go through separate rank updates.
void accumulate_gram(Eigen::MatrixXd& A, const double* W, const double* c, std::size_t rows, std::size_t n) {
  constexpr std::size_t kChunk = 2048;
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  RowMat P, Q;
  for (std::size_t start = 0; start < rows; start += kChunk) {
    std::size_t end = std::min(rows, start + kChunk);
    std::size_t np = 0, nq = 0;
    for (std::size_t j = start; j < end; ++j) (c[j] > 0.0 ? np : nq) += (c[j] != 0.0);
    P.resize(np, n);
    Q.resize(nq, n);
    std::size_t ip = 0, iq = 0;
    for (std::size_t j = start; j < end; ++j) {
      if (c[j] == 0.0) continue;
      double s = std::sqrt(std::fabs(c[j]));
      Eigen::Map<const Eigen::RowVectorXd> w(W + j * n, n);
      if (c[j] > 0.0) P.row(ip++) = s * w;
      else Q.row(iq++) = s * w;
    }
    if (np) A.selfadjointView<Eigen::Lower>().rankUpdate(P.transpose(), 1.0);
    if (nq) A.selfadjointView<Eigen::Lower>().rankUpdate(Q.transpose(), -1.0);
  }
}

HilbertOracles eig_block(const Eigen::MatrixXd& lowerA) {
  HilbertOracles out;
  if (lowerA.rows() == 1) {
    out.spectral = out.nuclear = std::fabs(lowerA(0, 0));
    return out;
  }
  Eigen::MatrixXd A = lowerA.selfadjointView<Eigen::Lower>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
  require(es.info() == Eigen::Success, ErrorKind::Numerical, "symmetric eigensolver failed");
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    double l = std::fabs(es.eigenvalues()[i]);
    out.spectral = std::max(out.spectral, l);
    out.nuclear += l;
  }
  return out;
}

}  // namespace

Eigen::MatrixXd coords_gram(const SymmetricTensorRep& U) {
  require(U.k() == 2, ErrorKind::Unsupported, "coords_gram needs k = 2");
  const std::size_t n = U.space().coord_dim(), rows = U.rank();
  require(n > 0, ErrorKind::Unsupported, "coords_gram needs a space with coordinates");
  std::vector<double> W(rows * n);
  for (std::size_t j = 0; j < rows; ++j) to_coords(U.space(), U.vector(j), {W.data() + j * n, n});
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  accumulate_gram(A, W.data(), U.weights().data(), rows, n);
  return Eigen::MatrixXd(A.selfadjointView<Eigen::Lower>());
}

HilbertOracles hilbert_k2_oracles(const SymmetricTensorRep& U) {
  check_hilbert_k2(U);
  HilbertOracles out;
  if (U.empty()) return out;
  const std::size_t n = U.space().coord_dim(), rows = U.rank();
  std::vector<double> W(rows * n);
  for (std::size_t j = 0; j < rows; ++j) to_coords(U.space(), U.vector(j), {W.data() + j * n, n});

  // Coordinates coupled by some term form one diagonal block of the matrix.
  UnionFind uf(n);
  std::vector<std::size_t> first(rows, n);
  for (std::size_t j = 0; j < rows; ++j) {
    if (U.weight(j) == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) {
      if (W[j * n + i] == 0.0) continue;
      if (first[j] == n) first[j] = i;
      else uf.unite(first[j], i);
    }
  }
  std::vector<std::size_t> comp_of(n), local(n);
  std::vector<std::vector<std::size_t>> comps;
  std::vector<std::size_t> root_to_comp(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = uf.find(i);
    if (root_to_comp[r] == n) {
      root_to_comp[r] = comps.size();
      comps.emplace_back();
    }
    comp_of[i] = root_to_comp[r];
    local[i] = comps[comp_of[i]].size();
    comps[comp_of[i]].push_back(i);
  }
  std::vector<std::vector<std::size_t>> terms(comps.size());
  for (std::size_t j = 0; j < rows; ++j)
    if (first[j] != n) terms[comp_of[first[j]]].push_back(j);

  std::vector<double> sub, cw;
  for (std::size_t b = 0; b < comps.size(); ++b) {
    if (terms[b].empty()) continue;
    const std::size_t m = comps[b].size();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
    if (m == 1) {
      std::size_t i = comps[b][0];
      for (std::size_t j : terms[b]) A(0, 0) += U.weight(j) * W[j * n + i] * W[j * n + i];
    } else {
      sub.assign(terms[b].size() * m, 0.0);
      cw.resize(terms[b].size());
      for (std::size_t t = 0; t < terms[b].size(); ++t) {
        std::size_t j = terms[b][t];
        cw[t] = U.weight(j);
        for (std::size_t i : comps[b]) sub[t * m + local[i]] = W[j * n + i];
      }
      accumulate_gram(A, sub.data(), cw.data(), terms[b].size(), m);
    }
    HilbertOracles h = eig_block(A);
    out.spectral = std::max(out.spectral, h.spectral);
    out.nuclear += h.nuclear;
  }
  return out;
}

HilbertOracles symmetric_matrix_oracles(const Eigen::MatrixXd& A) {
  require(A.rows() == A.cols(), ErrorKind::DimensionMismatch, "oracle needs a square matrix");
  const std::size_t n = std::size_t(A.rows());
  UnionFind uf(n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = j + 1; i < n; ++i)
      if (A(i, j) != 0.0 || A(j, i) != 0.0) uf.unite(i, j);
  std::vector<std::vector<std::size_t>> comps;
  std::vector<std::size_t> root_to_comp(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = uf.find(i);
    if (root_to_comp[r] == n) {
      root_to_comp[r] = comps.size();
      comps.emplace_back();
    }
    comps[root_to_comp[r]].push_back(i);
  }
  HilbertOracles out;
  for (const auto& c : comps) {
    Eigen::MatrixXd B(c.size(), c.size());
    for (std::size_t a = 0; a < c.size(); ++a)
      for (std::size_t b = 0; b < c.size(); ++b) B(a, b) = 0.5 * (A(c[a], c[b]) + A(c[b], c[a]));
    HilbertOracles h = eig_block(B);
    out.spectral = std::max(out.spectral, h.spectral);
    out.nuclear += h.nuclear;
  }
  return out;
}

}  // namespace bmc
