#pragma once

// Rank-structured symmetric tensors U = sum_j c_j x_j^{(x)k} and their norms.

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bmc/spaces.hpp"

namespace bmc {

class SymmetricTensorRep {
 public:
  SymmetricTensorRep() = default;
  SymmetricTensorRep(int k, SpacePtr space);

  int k() const { return k_; }
  const SpaceDescriptor& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  std::size_t rank() const { return weights_.size(); }
  /// Coefficients per term (space dimension).
  std::size_t dim() const { return dim_; }
  bool empty() const { return weights_.empty(); }

  void add(double c, const BanachVector& x);
  /// Unchecked-space fast path; coeffs must satisfy the space invariants.
  void add(double c, std::span<const double> coeffs);
  void append(const SymmetricTensorRep& other, double scale = 1.0);
  void reserve(std::size_t terms);

  double weight(std::size_t j) const { return weights_[j]; }
  std::span<const double> vector(std::size_t j) const {
    return {data_.data() + j * dim_, dim_};
  }
  BanachVector term(std::size_t j) const;
  std::span<const double> weights() const { return weights_; }
  /// Row-major rank x dim coefficient matrix.
  std::span<const double> matrix() const { return data_; }

  /// Drops terms with |c| < tol.
  void drop_small(double tol = 1e-15);
  /// Sorts terms lexicographically by (coeffs, weight) so that reps built in
  /// different orders compare equal and evaluate identically.
  void canonicalize();
  /// Sums the weights of terms with bitwise-identical vectors, then drops
  /// weights below tol. Leaves a.s. distinct samples untouched.
  void merge_identical(double tol = 1e-15);

 private:
  int k_ = 1;
  SpacePtr space_;
  std::size_t dim_ = 0;
  std::vector<double> weights_;
  std::vector<double> data_;
};

/// a - b as one rep (b's weights negated).
SymmetricTensorRep difference(const SymmetricTensorRep& a, const SymmetricTensorRep& b);

class DenseTensor {
 public:
  static constexpr std::size_t kMaxEntries = 1000000;

  DenseTensor(int k, std::size_t n);
  int k() const { return k_; }
  std::size_t n() const { return n_; }
  std::size_t size() const { return entries_.size(); }
  std::vector<double>& entries() { return entries_; }
  const std::vector<double>& entries() const { return entries_; }
  /// Row-major multi-index, last index fastest.
  double& at(std::span<const std::size_t> idx);
  double at(std::span<const std::size_t> idx) const;

 private:
  int k_;
  std::size_t n_;
  std::vector<double> entries_;
};

/// Dense sum_j c_j w_j^{(x)k} in the isometric coordinates of the rep's space.
DenseTensor to_dense(const SymmetricTensorRep& U);
/// (1/k!) sum over permutations of the index positions; k <= 8.
DenseTensor symmetrize_dense(const DenseTensor& T);
double max_abs_diff(const DenseTensor& a, const DenseTensor& b);

struct AscentOptions {
  int restarts = 32;
  double grad_tol = 1e-10;
  int max_iters = 5000;
  std::uint64_t seed = 0x5eed;
};

struct InjectiveResult {
  double value = 0.0;
  DualFunctional certificate;  // null for an empty rep
  /// True when the value is exact (k = 1) rather than a certified lower bound.
  bool exact = false;
  bool converged = false;
  int restarts = 0;
};

/// Symmetric injective norm sup_{f in B_{E'}} |sum_j c_j f(x_j)^k|. A lower
/// bound certified by the returned functional; exact for k = 1.
InjectiveResult injective_norm(const SymmetricTensorRep& U, const AscentOptions& opts = {});

/// sum_j |c_j| ||x_j||^k, the value of this representation in the projective infimum.
double projective_norm_upper(const SymmetricTensorRep& U);

struct HilbertOracles {
  double spectral = 0.0;
  double nuclear = 0.0;
};

/// Exact eps/pi norms for k = 2 in Hilbert spaces (l_2 or W^1_2 FEM via its
/// isometric coordinates): max |eig| and sum |eig| of sum_j c_j w_j w_j^T.
HilbertOracles hilbert_k2_oracles(const SymmetricTensorRep& U);
/// Same for an explicit symmetric matrix; detects block-diagonal structure.
HilbertOracles symmetric_matrix_oracles(const Eigen::MatrixXd& A);
/// sum_j c_j w_j w_j^T in coordinates (k = 2 reps only).
Eigen::MatrixXd coords_gram(const SymmetricTensorRep& U);

/// Full injective norm of a dense order-k tensor over l_p^n: alternating
/// maximization over k independent dual unit-ball functionals. Lower bound.
/// `init`, if given, seeds the first restart with f_1 = ... = f_k = init.
double full_injective_norm_dense(const DenseTensor& T, double p, const AscentOptions& opts = {},
                                 std::span<const double> init = {});

}  // namespace bmc
