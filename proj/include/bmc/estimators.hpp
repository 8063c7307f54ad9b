#pragma once

// Standard and multilevel Monte Carlo estimators of the k-th moment and
// their errors in tensor norms.

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "bmc/models.hpp"
#include "bmc/tensor.hpp"

namespace bmc {

struct MomentEstimate {
  int k = 1;
  /// One rep per level (a single entry for standard MC); level l lives in its own space.
  std::vector<SymmetricTensorRep> levels;
  std::vector<std::size_t> M;
  double work_units = 0.0;
  SeedSpec seed;

  std::size_t rank() const;
  /// All terms embedded into `target` (nested FEM grids are prolonged).
  SymmetricTensorRep flatten(const SpacePtr& target) const;
  /// Finest level space.
  SpacePtr finest_space() const;
};

enum class Provenance { Analytic, Exhaustive, FineLevelAverage };
const char* to_string(Provenance p);

struct ReferenceMoment {
  SymmetricTensorRep rep;
  Provenance provenance = Provenance::Analytic;
  std::string note;
  /// Cached coordinate Gram matrix for k = 2 Hilbert error evaluation.
  mutable std::optional<Eigen::MatrixXd> gram;
};

enum class NormKind { EpsS, PiUpper, HilbertK2Exact, HilbertK2Nuclear };
const char* to_string(NormKind k);
NormKind norm_kind_from_string(const std::string& s);

// ---- assembly from explicit samples (shared by the samplers below) --------

MomentEstimate mc_from_samples(int k, const std::vector<BanachVector>& samples);
/// samples[l-1] holds the coupled samples of level l; all in that level's space.
MomentEstimate mlmc_from_samples(int k, const std::vector<std::vector<CoupledSample>>& samples);

// ---- estimators -----------------------------------------------------------

/// (1/M) sum_j x_j^{(x)k} with x_j = sampler(seed.child(j)).
MomentEstimate mc_kth_moment(const Sampler& sampler, int k, std::size_t M, const SeedSpec& seed);
/// sum_l (1/M_l) sum_j (X_l^{(x)k} - X_{l-1}^{(x)k}), sample j of level l seeded
/// by seed.child(l).child(j). With `compress` (k = 2 only), a level whose M_l
/// exceeds four times its dimension is stored as the eigen-decomposition of
/// its Gram matrix instead of 2 M_l terms.
MomentEstimate mlmc_estimate(const LevelHierarchy& model, int k, const std::vector<std::size_t>& M,
                             const SeedSpec& seed, bool compress = false);

/// Fine-level single-level reference at `level` with M samples. For k = 2 the
/// sum is accumulated as a Gram matrix and stored in eigen-compressed form.
ReferenceMoment reference_fine_average(const LevelHierarchy& model, int level, int k, std::size_t M,
                                       const SeedSpec& seed);

double error_in_norm(const MomentEstimate& est, const ReferenceMoment& ref, NormKind kind,
                     const AscentOptions& opts = {});

struct LqError {
  double value = 0.0;
  double standard_error = 0.0;
};

/// (1/R sum_r err_r^q)^{1/q} with a bootstrap standard error (`resamples` draws).
LqError lq_error(const std::vector<double>& errors, double q, std::size_t resamples = 1000,
                 std::uint64_t seed = 0x6a09e667f3bcc909ULL);

/// Nodal-coefficient Gram matrix sum_j c_j v_j v_j^T of a k = 2 rep.
Eigen::MatrixXd nodal_gram(const SymmetricTensorRep& U);
/// L G L^T for the linear map L = (v -> coords of v embedded in `target`).
Eigen::MatrixXd lift_gram_to_coords(const Eigen::MatrixXd& G, const SpacePtr& from, const SpacePtr& target);

}  // namespace bmc
