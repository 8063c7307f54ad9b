#include "bmc/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bmc/error.hpp"

namespace bmc {

SymmetricTensorRep::SymmetricTensorRep(int k, SpacePtr space) : k_(k), space_(std::move(space)) {
  require(k >= 1, ErrorKind::InvalidArgument, "tensor order k must be >= 1");
  require(static_cast<bool>(space_), ErrorKind::InvalidArgument, "tensor rep without space");
  dim_ = space_->dimension();
}

void SymmetricTensorRep::add(double c, const BanachVector& x) {
  require(same_space(x.space(), *space_), ErrorKind::SpaceMismatch, "rep term from a different space");
  add(c, x.coeffs());
}

void SymmetricTensorRep::add(double c, std::span<const double> coeffs) {
  require(coeffs.size() == dim_, ErrorKind::DimensionMismatch, "rep term has wrong length");
  require(std::isfinite(c), ErrorKind::Numerical, "non-finite tensor weight");
  weights_.push_back(c);
  data_.insert(data_.end(), coeffs.begin(), coeffs.end());
}

void SymmetricTensorRep::append(const SymmetricTensorRep& other, double scale) {
  if (other.empty()) return;
  require(k_ == other.k_, ErrorKind::InvalidArgument, "appending reps of different order");
  require(same_space(*space_, *other.space_), ErrorKind::SpaceMismatch, "appending reps from different spaces");
  for (double w : other.weights_) weights_.push_back(scale * w);
  data_.insert(data_.end(), other.data_.begin(), other.data_.end());
}

void SymmetricTensorRep::reserve(std::size_t terms) {
  weights_.reserve(terms);
  data_.reserve(terms * dim_);
}

BanachVector SymmetricTensorRep::term(std::size_t j) const {
  auto v = vector(j);
  return BanachVector(space_, std::vector<double>(v.begin(), v.end()));
}

void SymmetricTensorRep::drop_small(double tol) {
  std::size_t out = 0;
  for (std::size_t j = 0; j < rank(); ++j) {
    if (std::fabs(weights_[j]) < tol) continue;
    if (out != j) {
      weights_[out] = weights_[j];
      std::copy_n(data_.begin() + j * dim_, dim_, data_.begin() + out * dim_);
    }
    ++out;
  }
  weights_.resize(out);
  data_.resize(out * dim_);
}

void SymmetricTensorRep::canonicalize() {
  std::vector<std::size_t> order(rank());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    auto va = vector(a), vb = vector(b);
    int cmp = 0;
    for (std::size_t i = 0; i < dim_ && cmp == 0; ++i) cmp = va[i] < vb[i] ? -1 : (va[i] > vb[i] ? 1 : 0);
    if (cmp != 0) return cmp < 0;
    return weights_[a] < weights_[b];
  });
  std::vector<double> w(rank()), d(data_.size());
  for (std::size_t j = 0; j < order.size(); ++j) {
    w[j] = weights_[order[j]];
    std::copy_n(data_.begin() + order[j] * dim_, dim_, d.begin() + j * dim_);
  }
  weights_ = std::move(w);
  data_ = std::move(d);
}

void SymmetricTensorRep::merge_identical(double tol) {
  canonicalize();
  std::size_t out = 0;
  for (std::size_t j = 0; j < rank(); ++j) {
    if (out > 0 && std::equal(data_.begin() + j * dim_, data_.begin() + (j + 1) * dim_,
                              data_.begin() + (out - 1) * dim_)) {
      weights_[out - 1] += weights_[j];
      continue;
    }
    if (out != j) {
      weights_[out] = weights_[j];
      std::copy_n(data_.begin() + j * dim_, dim_, data_.begin() + out * dim_);
    }
    ++out;
  }
  weights_.resize(out);
  data_.resize(out * dim_);
  drop_small(tol);
}

SymmetricTensorRep difference(const SymmetricTensorRep& a, const SymmetricTensorRep& b) {
  require(a.k() == b.k(), ErrorKind::InvalidArgument, "difference of reps with different k");
  require(same_space(a.space(), b.space()), ErrorKind::SpaceMismatch, "difference of reps in different spaces");
  SymmetricTensorRep out(a.k(), a.space_ptr());
  out.reserve(a.rank() + b.rank());
  out.append(a, 1.0);
  out.append(b, -1.0);
  return out;
}

// ---------------------------------------------------------------------------

DenseTensor::DenseTensor(int k, std::size_t n) : k_(k), n_(n) {
  require(k >= 1 && n >= 1, ErrorKind::InvalidArgument, "dense tensor needs k, n >= 1");
  std::size_t total = 1;
  for (int i = 0; i < k; ++i) {
    require(total <= kMaxEntries / n, ErrorKind::InvalidArgument, "dense tensor exceeds 1e6 entries");
    total *= n;
  }
  entries_.assign(total, 0.0);
}

double& DenseTensor::at(std::span<const std::size_t> idx) {
  std::size_t off = 0;
  for (std::size_t i : idx) off = off * n_ + i;
  return entries_[off];
}

double DenseTensor::at(std::span<const std::size_t> idx) const {
  std::size_t off = 0;
  for (std::size_t i : idx) off = off * n_ + i;
  return entries_[off];
}

DenseTensor to_dense(const SymmetricTensorRep& U) {
  const std::size_t n = U.space().coord_dim();
  require(n > 0, ErrorKind::Unsupported, "to_dense needs a space with coordinates");
  DenseTensor T(U.k(), n);
  std::vector<double> w(n), cur, next;
  for (std::size_t j = 0; j < U.rank(); ++j) {
    to_coords(U.space(), U.vector(j), w);
    cur.assign(1, U.weight(j));
    for (int m = 0; m < U.k(); ++m) {
      next.resize(cur.size() * n);
      for (std::size_t a = 0; a < cur.size(); ++a)
        for (std::size_t b = 0; b < n; ++b) next[a * n + b] = cur[a] * w[b];
      cur.swap(next);
    }
    auto& e = T.entries();
    for (std::size_t i = 0; i < e.size(); ++i) e[i] += cur[i];
  }
  return T;
}

DenseTensor symmetrize_dense(const DenseTensor& T) {
  const int k = T.k();
  require(k <= 8, ErrorKind::Unsupported, "symmetrization enumerates k! permutations; k <= 8 only");
  const std::size_t n = T.n();
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<int>> perms;
  do perms.push_back(perm);
  while (std::next_permutation(perm.begin(), perm.end()));
  const double inv = 1.0 / double(perms.size());

  DenseTensor out(k, n);
  std::vector<std::size_t> idx(k, 0), pidx(k);
  for (std::size_t off = 0; off < T.size(); ++off) {
    std::size_t r = off;
    for (int m = k - 1; m >= 0; --m) {
      idx[m] = r % n;
      r /= n;
    }
    double acc = 0.0;
    for (const auto& p : perms) {
      for (int m = 0; m < k; ++m) pidx[m] = idx[p[m]];
      acc += T.at(pidx);
    }
    out.entries()[off] = acc * inv;
  }
  return out;
}

double max_abs_diff(const DenseTensor& a, const DenseTensor& b) {
  require(a.k() == b.k() && a.n() == b.n(), ErrorKind::DimensionMismatch, "dense tensors differ in shape");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a.entries()[i] - b.entries()[i]));
  return m;
}

double projective_norm_upper(const SymmetricTensorRep& U) {
  double s = 0.0;
  for (std::size_t j = 0; j < U.rank(); ++j) {
    if (U.weight(j) == 0.0) continue;
    BanachVector x(U.space_ptr(), std::vector<double>(U.vector(j).begin(), U.vector(j).end()));
    s += std::fabs(U.weight(j)) * std::pow(norm(x), U.k());
  }
  return s;
}

}  // namespace bmc
