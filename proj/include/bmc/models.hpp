#pragma once

// Model problems as level hierarchies with coupled fine/coarse samples:
// 1D elliptic FEM with log-Gaussian coefficient, elliptic FEM with random
// forcing (1D and structured 2D), and Euler-Maruyama paths in Hölder spaces.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "bmc/sampling.hpp"
#include "bmc/spaces.hpp"

namespace bmc {

struct CoupledSample {
  BanachVector fine;
  /// Level-(l-1) approximation in the fine space (zero at l = 1).
  BanachVector coarse;
  int level = 1;
  double work_units = 0.0;
};

class LevelHierarchy {
 public:
  virtual ~LevelHierarchy() = default;
  virtual std::string name() const = 0;
  /// Space in which level-l samples (fine and coarse) live.
  virtual SpacePtr space(int level) const = 0;
  /// Discretization size N_l.
  virtual double size(int level) const = 0;
  virtual double refinement_factor() const = 0;
  /// Nominal per-sample cost exponent in N_l.
  virtual double cost_exponent() const = 0;
  /// Approximations at several levels from one realization of the randomness,
  /// each in the native space of its level. `work` receives the solver work.
  virtual std::vector<BanachVector> solve_levels(const std::vector<int>& levels, const SeedSpec& seed,
                                                 double* work = nullptr) const = 0;
  virtual CoupledSample sample(int level, const SeedSpec& seed) const;
  /// Embeds a level-`from` vector into the level-`to` space (nested grids).
  virtual BanachVector embed(const BanachVector& v, int to) const;
};

using Sampler = std::function<BanachVector(const SeedSpec&)>;

// ---- FEM ------------------------------------------------------------------

using ScalarFn = std::function<double(double)>;

/// P1 Galerkin solution of -(a u')' = f with the boundary condition of
/// `space` (u(0) = 0 and a(b)u'(b) = 0, or u = 0 at both ends). `a_elem`
/// holds one coefficient value per element (midpoint rule). Load vector by
/// 3-point Gauss quadrature per element. Returns nodal values; `work`
/// receives the number of unknowns.
BanachVector fem1d_solve(const std::vector<double>& a_elem, const ScalarFn& f, const SpacePtr& space,
                         double* work = nullptr);

/// P1 solution of -Laplace u = f on the unit square with homogeneous Dirichlet
/// data on the lattice of `space`; conjugate gradients. `iterations`
/// receives the CG iteration count.
BanachVector fem2d_poisson_solve(const std::function<double(double, double)>& f, const SpacePtr& space,
                                 int* iterations = nullptr, double tol = 1e-12);

struct LogGaussConfig {
  KlFieldConfig field;
  ScalarFn forcing = [](double) { return 1.0; };
  double p = 2.0;
  std::size_t base_elements = 1;  // N_l = base_elements * 2^l
};

class Elliptic1dLogGauss : public LevelHierarchy {
 public:
  explicit Elliptic1dLogGauss(LogGaussConfig cfg);
  std::string name() const override { return "elliptic1d_loggauss"; }
  SpacePtr space(int level) const override;
  double size(int level) const override;
  double refinement_factor() const override { return 2.0; }
  double cost_exponent() const override { return 1.0; }
  std::vector<BanachVector> solve_levels(const std::vector<int>& levels, const SeedSpec& seed,
                                         double* work = nullptr) const override;
  /// Solution for a fixed field realization (mode coefficients xi).
  BanachVector solve_with_modes(int level, const std::vector<double>& xi, double* work = nullptr) const;
  const LogGaussConfig& config() const { return cfg_; }

 private:
  LogGaussConfig cfg_;
  mutable std::vector<SpacePtr> spaces_;
};

/// Truncated random series f(x, w) = mean + sum_m eta_m psi_m(x).
struct ForcingLaw {
  enum class Eta { Gaussian, StudentT };
  double mean = 1.0;
  std::vector<double> amplitudes;  // scale of eta_m
  Eta eta = Eta::Gaussian;
  double dof = 10.0;  // Student-t degrees of freedom (moments of order < dof exist)
};

class EllipticForcing : public LevelHierarchy {
 public:
  EllipticForcing(ForcingLaw law, int dim, double p, std::size_t base_cells = 1);
  std::string name() const override { return dim_ == 1 ? "elliptic1d_forcing" : "elliptic2d_forcing"; }
  SpacePtr space(int level) const override;
  /// Number of cells (1D) or squares (2D) on level l.
  double size(int level) const override;
  double refinement_factor() const override { return dim_ == 1 ? 2.0 : 4.0; }
  double cost_exponent() const override { return dim_ == 1 ? 1.0 : 1.5; }
  std::vector<BanachVector> solve_levels(const std::vector<int>& levels, const SeedSpec& seed,
                                         double* work = nullptr) const override;
  int dim() const { return dim_; }

 private:
  ForcingLaw law_;
  int dim_;
  double p_;
  std::size_t base_;
  mutable std::vector<SpacePtr> spaces_;
};

// ---- SDE ------------------------------------------------------------------

/// Componentwise scalar SDE dX_i = mu(X_i) dt + sigma(X_i) dB_i, i < d.
struct SdeSpec {
  std::string preset = "gbm";  // gbm | ou | linear | zero | const_drift
  std::vector<double> params;  // preset parameters, see sde_preset_help()
  std::vector<double> x0 = {1.0};
  double T = 1.0;

  std::size_t dim() const { return x0.size(); }
  double drift(double x) const;
  double diffusion(double x) const;
  void validate() const;
};

std::string sde_preset_help();

/// Euler-Maruyama values at the N + 1 nodes jT/N; increments are node-major
/// (N * d entries).
std::vector<double> em_nodes(const SdeSpec& spec, std::size_t N, const std::vector<double>& increments);
/// EM path linearly interpolated onto the grid of `out_space` (a HolderPath space).
BanachVector em_path(const SdeSpec& spec, std::size_t N, const std::vector<double>& increments,
                     const SpacePtr& out_space);
/// Sums consecutive groups of `factor` steps (node-major, d components).
std::vector<double> coarsen_increments(const std::vector<double>& fine, std::size_t factor, std::size_t d = 1);
/// Brownian-bridge refinement: splits each coarse increment into `factor`
/// conditionally Gaussian pieces of variance dt_fine whose sum is exact.
std::vector<double> bridge_refine(const std::vector<double>& coarse, std::size_t factor, double dt_fine,
                                  Stream& rng, std::size_t d = 1);

struct SdeHierarchyConfig {
  SdeSpec spec;
  double delta = 0.0;
  std::size_t n1 = 4;          // N_1
  std::size_t factor = 2;      // A
  int output_level = 8;        // common output grid = level grid N_{output_level}
};

class SdeHierarchy : public LevelHierarchy {
 public:
  explicit SdeHierarchy(SdeHierarchyConfig cfg);
  std::string name() const override { return "sde_" + cfg_.spec.preset; }
  SpacePtr space(int level) const override;
  double size(int level) const override;
  double refinement_factor() const override { return double(cfg_.factor); }
  double cost_exponent() const override { return 1.0; }
  std::vector<BanachVector> solve_levels(const std::vector<int>& levels, const SeedSpec& seed,
                                         double* work = nullptr) const override;
  BanachVector embed(const BanachVector& v, int to) const override;
  /// Brownian increments of the level-`level` grid for this seed.
  std::vector<double> increments(int level, const SeedSpec& seed) const;
  const SdeHierarchyConfig& config() const { return cfg_; }

 private:
  SdeHierarchyConfig cfg_;
  SpacePtr out_space_;
};

/// X(t) = x0 exp(sigma B(t) + (mu - sigma^2/2) t) at the nodes of an N-step grid.
std::vector<double> gbm_exact_nodes(double x0, double mu, double sigma, double T, const std::vector<double>& increments);

// ---- simple samplers ------------------------------------------------------

Sampler constant_sampler(BanachVector x);
/// Standard Gaussian coordinates in l_p^n.
Sampler gaussian_sampler(std::size_t n, double p);
/// Uniform random basis vector e_I in l_2^n.
Sampler uniform_basis_sampler(std::size_t n);
/// r * e_I in l_1^n with a Rademacher sign r and I uniform.
Sampler signed_basis_sampler(std::size_t n);
/// Uniform draw from a finite list of atoms.
Sampler finite_sampler(std::vector<BanachVector> atoms);

}  // namespace bmc
