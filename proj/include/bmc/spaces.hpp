#pragma once

// Discretized Banach spaces: sequence spaces l_p^n, P1 finite element spaces
// with the W^1_p seminorm (1D and structured 2D), and Hölder path spaces
// C^delta([0,T]; R^d) sampled on a grid.

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bmc {

enum class SpaceKind { SequenceLp, FemW1p1d, FemW1p2d, HolderPath };

enum class Boundary {
  None,
  /// u(0) = 0, natural condition on the right end.
  DirichletLeftNeumannRight,
  /// zero on the whole boundary.
  DirichletAll,
};

const char* to_string(SpaceKind kind);
const char* to_string(Boundary b);
SpaceKind space_kind_from_string(const std::string& s);
Boundary boundary_from_string(const std::string& s);

struct SpaceDescriptor {
  SpaceKind kind = SpaceKind::SequenceLp;
  double p = 2.0;
  double delta = 0.0;
  /// 1D node coordinates (FEM 1D, Hölder paths) or per-axis lattice
  /// coordinates for the 2D FEM space on the unit square.
  std::vector<double> grid;
  Boundary boundary = Boundary::None;
  std::size_t seq_dim = 0;
  std::size_t value_dim = 1;

  /// Number of coefficients of a vector in this space.
  std::size_t dimension() const;
  /// Elements (1D), triangles (2D) or 0.
  std::size_t element_count() const;
  /// Number of entries in the isometric weighted-coordinate image (see to_coords).
  std::size_t coord_dim() const;
  /// 1 for sequence / 1D FEM coordinates, 2 for the per-triangle gradients in 2D.
  std::size_t block_size() const;
  /// Dual exponent p' (infinity for p = 1).
  double dual_exponent() const;
  /// max cell / min cell; 1 for sequence spaces.
  double quasi_uniformity() const;
  bool uniform_grid() const;

  /// Throws Error on violated invariants.
  void validate() const;
};

using SpacePtr = std::shared_ptr<const SpaceDescriptor>;

bool same_space(const SpaceDescriptor& a, const SpaceDescriptor& b);

SpacePtr make_sequence_space(std::size_t n, double p);
SpacePtr make_fem1d_space(std::vector<double> grid, double p, Boundary boundary);
SpacePtr make_fem1d_uniform(double length, std::size_t elements, double p, Boundary boundary);
SpacePtr make_fem2d_space(std::size_t cells_per_side, double p);
SpacePtr make_holder_space(std::vector<double> grid, double delta, std::size_t value_dim = 1);
SpacePtr make_holder_uniform(double horizon, std::size_t cells, double delta, std::size_t value_dim = 1);
/// Same space with a different integrability exponent.
SpacePtr with_exponent(const SpacePtr& space, double p);

class BanachVector {
 public:
  BanachVector() = default;
  /// Validates length and essential boundary conditions.
  BanachVector(SpacePtr space, std::vector<double> coeffs);
  static BanachVector zero(SpacePtr space);

  const SpaceDescriptor& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  std::span<const double> coeffs() const { return coeffs_; }
  std::size_t size() const { return coeffs_.size(); }
  double operator[](std::size_t i) const { return coeffs_[i]; }

  BanachVector scaled(double a) const;
  /// a*this + b*other
  BanachVector combine(double a, const BanachVector& other, double b) const;

 private:
  SpacePtr space_;
  std::vector<double> coeffs_;
};

/// Point evaluation plus scaled difference, the generating family of the
/// Hölder dual ball: a * <e1, f(t)> + b * <e2, f(s) - f(u)> / |s - u|^delta.
struct HolderAtom {
  std::size_t t = 0;
  double a = 0.0;
  std::size_t s = 0;
  std::size_t u = 0;
  double b = 0.0;
};

class DualFunctional {
 public:
  DualFunctional() = default;
  /// Coordinate functional (sequence and FEM spaces): acts on to_coords(v).
  DualFunctional(SpacePtr space, std::vector<double> rep);
  /// Hölder functional; `directions` holds e1 then e2 (2 * value_dim entries).
  DualFunctional(SpacePtr space, HolderAtom atom, std::vector<double> directions);

  const SpaceDescriptor& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  std::span<const double> rep() const { return rep_; }
  const std::optional<HolderAtom>& atom() const { return atom_; }
  bool valid() const { return static_cast<bool>(space_); }

 private:
  SpacePtr space_;
  std::vector<double> rep_;
  std::optional<HolderAtom> atom_;
};

/// ||v|| in its space. l_p norm, exact P1 W^1_p seminorm, or grid Hölder norm
/// (sup-norm plus grid seminorm over all node pairs; sup-norm alone for delta = 0).
double norm(const BanachVector& v);
double dual_pair(const DualFunctional& f, const BanachVector& v);
/// Upper bound on the dual norm (exact for coordinate functionals).
double dual_norm(const DualFunctional& f);
DualFunctional project_to_dual_ball(const DualFunctional& f);
/// A functional of dual norm <= 1 with <f, v> = ||v||.
DualFunctional norming_functional(const BanachVector& v);

/// Isometric weighted coordinates: identity for l_p, h_e^{1/p} * slope_e for
/// 1D FEM, |T|^{1/p} * grad v|_T for 2D FEM. `out` has space.coord_dim() entries.
void to_coords(const SpaceDescriptor& space, std::span<const double> v, std::span<double> out);
std::vector<double> to_coords(const BanachVector& v);
/// Mixed l_p(l_2-blocks) norm of a coordinate vector.
double coords_norm(std::span<const double> w, double p, std::size_t block);
double coords_dual_norm(std::span<const double> g, double p_dual, std::size_t block);

/// 1D FEM vector -> weighted slope sequence in l_p with identical norm.
BanachVector to_sequence(const BanachVector& v);

/// Piecewise-linear prolongation of a FEM/Hölder vector onto a finer nested grid.
BanachVector prolong(const BanachVector& v, const SpacePtr& target);

/// L_p(I) norm of a 1D P1 function by 3-point Gauss quadrature per element
/// (exact for polynomial integrands up to degree 5, so exact for p = 2).
double lp_norm_p1(const BanachVector& v, double p);

}  // namespace bmc
