#include "bmc/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bmc/error.hpp"
#include "bmc/kernels.hpp"

namespace bmc {

namespace {

constexpr double kGridTol = 1e-12;


void check_increasing(const std::vector<double>& g, const char* what) {
  require(g.size() >= 2, ErrorKind::InvalidArgument, std::string(what) + ": need at least 2 nodes");
  for (std::size_t i = 0; i < g.size(); ++i) {
    require(std::isfinite(g[i]), ErrorKind::InvalidArgument, std::string(what) + ": non-finite node");
    if (i > 0)
      require(g[i] > g[i - 1], ErrorKind::InvalidArgument,
              std::string(what) + ": nodes must be strictly increasing");
  }
}

double pow_abs(double x, double p) {
  double a = std::fabs(x);
  if (p == 1.0) return a;
  if (p == 2.0) return a * a;
  return std::pow(a, p);
}

// Hölder seminorm on a non-uniform grid or for vector-valued paths.
double holder_seminorm_generic(const SpaceDescriptor& s, std::span<const double> f) {
  const std::size_t n = s.grid.size(), d = s.value_dim;
  const bool uni = s.uniform_grid();
  std::vector<double> inv_pow;
  if (uni) {
    double h = (s.grid.back() - s.grid.front()) / double(n - 1);
    inv_pow.resize(n);
    for (std::size_t g = 1; g < n; ++g) inv_pow[g] = std::pow(double(g) * h, -s.delta);
  }
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double sq = 0.0;
      for (std::size_t c = 0; c < d; ++c) {
        double df = f[j * d + c] - f[i * d + c];
        sq += df * df;
      }
      double w = uni ? inv_pow[j - i] : std::pow(s.grid[j] - s.grid[i], -s.delta);
      best = std::max(best, std::sqrt(sq) * w);
    }
  }
  return best;
}

double holder_seminorm(const SpaceDescriptor& s, std::span<const double> f) {
  const std::size_t n = s.grid.size();
  if (s.value_dim == 1 && s.uniform_grid()) {
    double h = (s.grid.back() - s.grid.front()) / double(n - 1);
    std::vector<double> inv_pow(n, 0.0);
    for (std::size_t g = 1; g < n; ++g) inv_pow[g] = std::pow(double(g) * h, -s.delta);
    return kernels::active().holder_uniform(f.data(), n, inv_pow.data());
  }
  return holder_seminorm_generic(s, f);
}

double holder_sup(const SpaceDescriptor& s, std::span<const double> f) {
  if (s.value_dim == 1) return kernels::max_abs(f);
  double best = 0.0;
  for (std::size_t i = 0; i < s.grid.size(); ++i)
    best = std::max(best, std::sqrt(kernels::sum_sq(f.subspan(i * s.value_dim, s.value_dim))));
  return best;
}

double holder_norm(const SpaceDescriptor& s, std::span<const double> f) {
  double v = holder_sup(s, f);
  if (s.delta > 0.0) v += holder_seminorm(s, f);
  return v;
}

std::size_t locate_cell(const std::vector<double>& g, double x) {
  auto it = std::upper_bound(g.begin(), g.end(), x);
  std::size_t i = it == g.begin() ? 0 : std::size_t(it - g.begin()) - 1;
  return std::min(i, g.size() - 2);
}

}  // namespace

const char* to_string(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::SequenceLp: return "SequenceLp";
    case SpaceKind::FemW1p1d: return "FemW1p1d";
    case SpaceKind::FemW1p2d: return "FemW1p2d";
    case SpaceKind::HolderPath: return "HolderPath";
  }
  return "?";
}

const char* to_string(Boundary b) {
  switch (b) {
    case Boundary::None: return "none";
    case Boundary::DirichletLeftNeumannRight: return "dirichlet_left_neumann_right";
    case Boundary::DirichletAll: return "dirichlet_all";
  }
  return "?";
}

SpaceKind space_kind_from_string(const std::string& s) {
  for (auto k : {SpaceKind::SequenceLp, SpaceKind::FemW1p1d, SpaceKind::FemW1p2d, SpaceKind::HolderPath})
    if (s == to_string(k)) return k;
  fail(ErrorKind::InvalidArgument, "unknown space kind '" + s + "'");
}

Boundary boundary_from_string(const std::string& s) {
  for (auto b : {Boundary::None, Boundary::DirichletLeftNeumannRight, Boundary::DirichletAll})
    if (s == to_string(b)) return b;
  fail(ErrorKind::InvalidArgument, "unknown boundary tag '" + s + "'");
}

std::size_t SpaceDescriptor::dimension() const {
  switch (kind) {
    case SpaceKind::SequenceLp: return seq_dim;
    case SpaceKind::FemW1p1d: return grid.size();
    case SpaceKind::FemW1p2d: return grid.size() * grid.size();
    case SpaceKind::HolderPath: return grid.size() * value_dim;
  }
  return 0;
}

std::size_t SpaceDescriptor::element_count() const {
  switch (kind) {
    case SpaceKind::FemW1p1d: return grid.size() - 1;
    case SpaceKind::FemW1p2d: return 2 * (grid.size() - 1) * (grid.size() - 1);
    default: return 0;
  }
}

std::size_t SpaceDescriptor::coord_dim() const {
  switch (kind) {
    case SpaceKind::SequenceLp: return seq_dim;
    case SpaceKind::FemW1p1d: return grid.size() - 1;
    case SpaceKind::FemW1p2d: return 2 * element_count();
    case SpaceKind::HolderPath: return 0;
  }
  return 0;
}

std::size_t SpaceDescriptor::block_size() const { return kind == SpaceKind::FemW1p2d ? 2 : 1; }

double SpaceDescriptor::dual_exponent() const {
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  return p / (p - 1.0);
}

double SpaceDescriptor::quasi_uniformity() const {
  if (kind == SpaceKind::SequenceLp || grid.size() < 2) return 1.0;
  double hmin = std::numeric_limits<double>::infinity(), hmax = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    double h = grid[i] - grid[i - 1];
    hmin = std::min(hmin, h);
    hmax = std::max(hmax, h);
  }
  return hmax / hmin;
}

bool SpaceDescriptor::uniform_grid() const {
  if (grid.size() < 2) return true;
  double h = (grid.back() - grid.front()) / double(grid.size() - 1);
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (std::fabs(grid[i] - grid[i - 1] - h) > 1e-10 * h) return false;
  return true;
}

void SpaceDescriptor::validate() const {
  if (kind != SpaceKind::HolderPath) {
    require(std::isfinite(p), ErrorKind::Unsupported, "p = infinity is not supported");
    require(p >= 1.0, ErrorKind::InvalidArgument, "p must be >= 1");
  }
  switch (kind) {
    case SpaceKind::SequenceLp:
      require(seq_dim >= 1, ErrorKind::InvalidArgument, "sequence space needs dimension >= 1");
      break;
    case SpaceKind::FemW1p1d:
      check_increasing(grid, "FEM grid");
      break;
    case SpaceKind::FemW1p2d:
      check_increasing(grid, "FEM lattice axis");
      require(std::fabs(grid.front()) < kGridTol && std::fabs(grid.back() - 1.0) < kGridTol,
              ErrorKind::InvalidArgument, "2D lattice must cover the unit square");
      break;
    case SpaceKind::HolderPath:
      check_increasing(grid, "path grid");
      require(delta >= 0.0 && delta < 1.0, ErrorKind::InvalidArgument, "delta must lie in [0,1)");
      require(value_dim >= 1, ErrorKind::InvalidArgument, "value_dim must be >= 1");
      break;
  }
}

bool same_space(const SpaceDescriptor& a, const SpaceDescriptor& b) {
  if (&a == &b) return true;
  return a.kind == b.kind && a.p == b.p && a.delta == b.delta && a.boundary == b.boundary &&
         a.seq_dim == b.seq_dim && a.value_dim == b.value_dim && a.grid == b.grid;
}

SpacePtr make_sequence_space(std::size_t n, double p) {
  SpaceDescriptor s;
  s.kind = SpaceKind::SequenceLp;
  s.seq_dim = n;
  s.p = p;
  s.validate();
  return std::make_shared<const SpaceDescriptor>(std::move(s));
}

SpacePtr make_fem1d_space(std::vector<double> grid, double p, Boundary boundary) {
  SpaceDescriptor s;
  s.kind = SpaceKind::FemW1p1d;
  s.grid = std::move(grid);
  s.p = p;
  s.boundary = boundary;
  s.validate();
  return std::make_shared<const SpaceDescriptor>(std::move(s));
}

SpacePtr make_fem1d_uniform(double length, std::size_t elements, double p, Boundary boundary) {
  require(elements >= 1 && length > 0.0, ErrorKind::InvalidArgument, "bad uniform FEM grid");
  std::vector<double> g(elements + 1);
  for (std::size_t i = 0; i <= elements; ++i) g[i] = length * double(i) / double(elements);
  return make_fem1d_space(std::move(g), p, boundary);
}

SpacePtr make_fem2d_space(std::size_t cells_per_side, double p) {
  require(cells_per_side >= 1, ErrorKind::InvalidArgument, "2D lattice needs >= 1 cell per side");
  SpaceDescriptor s;
  s.kind = SpaceKind::FemW1p2d;
  s.grid.resize(cells_per_side + 1);
  for (std::size_t i = 0; i <= cells_per_side; ++i) s.grid[i] = double(i) / double(cells_per_side);
  s.p = p;
  s.boundary = Boundary::DirichletAll;
  s.validate();
  return std::make_shared<const SpaceDescriptor>(std::move(s));
}

SpacePtr make_holder_space(std::vector<double> grid, double delta, std::size_t value_dim) {
  SpaceDescriptor s;
  s.kind = SpaceKind::HolderPath;
  s.grid = std::move(grid);
  s.delta = delta;
  s.value_dim = value_dim;
  s.p = 1.0;
  s.validate();
  return std::make_shared<const SpaceDescriptor>(std::move(s));
}

SpacePtr make_holder_uniform(double horizon, std::size_t cells, double delta, std::size_t value_dim) {
  require(cells >= 1 && horizon > 0.0, ErrorKind::InvalidArgument, "bad uniform path grid");
  std::vector<double> g(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i) g[i] = horizon * double(i) / double(cells);
  return make_holder_space(std::move(g), delta, value_dim);
}

SpacePtr with_exponent(const SpacePtr& space, double p) {
  SpaceDescriptor s = *space;
  s.p = p;
  s.validate();
  return std::make_shared<const SpaceDescriptor>(std::move(s));
}

// ---------------------------------------------------------------------------

BanachVector::BanachVector(SpacePtr space, std::vector<double> coeffs)
    : space_(std::move(space)), coeffs_(std::move(coeffs)) {
  require(static_cast<bool>(space_), ErrorKind::InvalidArgument, "vector without space");
  const auto& s = *space_;
  if (coeffs_.size() != s.dimension())
    fail(ErrorKind::DimensionMismatch, "coefficient length " + std::to_string(coeffs_.size()) +
                                           " does not match space dimension " + std::to_string(s.dimension()));
  for (double c : coeffs_)
    require(std::isfinite(c), ErrorKind::Numerical, "non-finite coefficient");
  if (s.kind == SpaceKind::FemW1p1d) {
    if (s.boundary != Boundary::None)
      require(coeffs_.front() == 0.0, ErrorKind::InvalidArgument, "FEM vector violates u(0)=0");
    if (s.boundary == Boundary::DirichletAll)
      require(coeffs_.back() == 0.0, ErrorKind::InvalidArgument, "FEM vector violates u(b)=0");
  } else if (s.kind == SpaceKind::FemW1p2d && s.boundary == Boundary::DirichletAll) {
    const std::size_t m = s.grid.size();
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t i = 0; i < m; ++i)
        if (i == 0 || j == 0 || i + 1 == m || j + 1 == m)
          require(coeffs_[j * m + i] == 0.0, ErrorKind::InvalidArgument,
                  "FEM vector violates the Dirichlet condition");
  }
}

BanachVector BanachVector::zero(SpacePtr space) {
  std::size_t n = space->dimension();
  return BanachVector(std::move(space), std::vector<double>(n, 0.0));
}

BanachVector BanachVector::scaled(double a) const {
  std::vector<double> c(coeffs_);
  for (double& x : c) x *= a;
  return BanachVector(space_, std::move(c));
}

BanachVector BanachVector::combine(double a, const BanachVector& other, double b) const {
  require(same_space(*space_, *other.space_), ErrorKind::SpaceMismatch, "combine: different spaces");
  std::vector<double> c(coeffs_.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = a * coeffs_[i] + b * other.coeffs_[i];
  return BanachVector(space_, std::move(c));
}

DualFunctional::DualFunctional(SpacePtr space, std::vector<double> rep)
    : space_(std::move(space)), rep_(std::move(rep)) {
  require(space_ && space_->kind != SpaceKind::HolderPath, ErrorKind::InvalidArgument,
          "coordinate functional needs a sequence or FEM space");
  require(rep_.size() == space_->coord_dim(), ErrorKind::DimensionMismatch,
          "functional length does not match the coordinate dimension");
}

DualFunctional::DualFunctional(SpacePtr space, HolderAtom atom, std::vector<double> directions)
    : space_(std::move(space)), rep_(std::move(directions)), atom_(atom) {
  require(space_ && space_->kind == SpaceKind::HolderPath, ErrorKind::InvalidArgument,
          "Hölder functional needs a path space");
  const std::size_t n = space_->grid.size();
  require(rep_.size() == 2 * space_->value_dim, ErrorKind::DimensionMismatch,
          "Hölder functional needs 2*value_dim direction entries");
  require(atom.t < n && atom.s < n && atom.u < n, ErrorKind::InvalidArgument, "grid index out of range");
  require(atom.b == 0.0 || atom.s != atom.u, ErrorKind::InvalidArgument,
          "difference functional needs distinct nodes");
  require(atom.b == 0.0 || space_->delta > 0.0, ErrorKind::InvalidArgument,
          "difference functionals are not part of the dual ball when delta = 0");
}

// ---------------------------------------------------------------------------

void to_coords(const SpaceDescriptor& s, std::span<const double> v, std::span<double> out) {
  require(v.size() == s.dimension(), ErrorKind::DimensionMismatch, "to_coords: bad length");
  require(out.size() == s.coord_dim(), ErrorKind::DimensionMismatch, "to_coords: bad output length");
  switch (s.kind) {
    case SpaceKind::SequenceLp:
      std::copy(v.begin(), v.end(), out.begin());
      return;
    case SpaceKind::FemW1p1d: {
      const double inv_p = 1.0 / s.p;
      for (std::size_t e = 0; e + 1 < s.grid.size(); ++e) {
        double h = s.grid[e + 1] - s.grid[e];
        double w = s.p == 2.0 ? std::sqrt(h) : std::pow(h, inv_p);
        out[e] = w * (v[e + 1] - v[e]) / h;
      }
      return;
    }
    case SpaceKind::FemW1p2d: {
      const std::size_t m = s.grid.size();
      std::size_t k = 0;
      for (std::size_t j = 0; j + 1 < m; ++j) {
        double hy = s.grid[j + 1] - s.grid[j];
        for (std::size_t i = 0; i + 1 < m; ++i) {
          double hx = s.grid[i + 1] - s.grid[i];
          double w = std::pow(0.5 * hx * hy, 1.0 / s.p);
          double v00 = v[j * m + i], v10 = v[j * m + i + 1];
          double v01 = v[(j + 1) * m + i], v11 = v[(j + 1) * m + i + 1];
          // lower-right triangle (00,10,11), then upper-left (00,11,01)
          out[k++] = w * (v10 - v00) / hx;
          out[k++] = w * (v11 - v10) / hy;
          out[k++] = w * (v11 - v01) / hx;
          out[k++] = w * (v01 - v00) / hy;
        }
      }
      return;
    }
    case SpaceKind::HolderPath:
      fail(ErrorKind::Unsupported, "Hölder paths have no coordinate image");
  }
}

std::vector<double> to_coords(const BanachVector& v) {
  std::vector<double> out(v.space().coord_dim());
  to_coords(v.space(), v.coeffs(), out);
  return out;
}

double coords_norm(std::span<const double> w, double p, std::size_t block) {
  if (block == 1) {
    if (p == 1.0) return kernels::sum_abs(w);
    if (p == 2.0) return std::sqrt(kernels::sum_sq(w));
    double s = 0.0;
    for (double x : w) s += pow_abs(x, p);
    return std::pow(s, 1.0 / p);
  }
  if (p == 2.0) return std::sqrt(kernels::sum_sq(w));
  if (std::isinf(p)) {
    double m = 0.0;
    for (std::size_t i = 0; i < w.size(); i += block)
      m = std::max(m, std::sqrt(kernels::sum_sq(w.subspan(i, block))));
    return m;
  }
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); i += block)
    s += std::pow(kernels::sum_sq(w.subspan(i, block)), 0.5 * p);
  return std::pow(s, 1.0 / p);
}

double coords_dual_norm(std::span<const double> g, double p_dual, std::size_t block) {
  if (std::isinf(p_dual) && block == 1) return kernels::max_abs(g);
  return coords_norm(g, p_dual, block);
}

double norm(const BanachVector& v) {
  const auto& s = v.space();
  switch (s.kind) {
    case SpaceKind::SequenceLp:
      return coords_norm(v.coeffs(), s.p, 1);
    case SpaceKind::FemW1p1d:
    case SpaceKind::FemW1p2d: {
      auto w = to_coords(v);
      return coords_norm(w, s.p, s.block_size());
    }
    case SpaceKind::HolderPath:
      return holder_norm(s, v.coeffs());
  }
  return 0.0;
}

double dual_pair(const DualFunctional& f, const BanachVector& v) {
  require(f.valid(), ErrorKind::InvalidArgument, "dual_pair: null functional");
  require(same_space(f.space(), v.space()), ErrorKind::SpaceMismatch, "dual_pair: different spaces");
  const auto& s = v.space();
  if (s.kind == SpaceKind::HolderPath) {
    const auto& a = *f.atom();
    const std::size_t d = s.value_dim;
    auto c = v.coeffs();
    auto e = f.rep();
    double val = 0.0;
    for (std::size_t i = 0; i < d; ++i) val += a.a * e[i] * c[a.t * d + i];
    if (a.b != 0.0) {
      double scale = std::pow(std::fabs(s.grid[a.s] - s.grid[a.u]), -s.delta);
      double diff = 0.0;
      for (std::size_t i = 0; i < d; ++i) diff += e[d + i] * (c[a.s * d + i] - c[a.u * d + i]);
      val += a.b * scale * diff;
    }
    return val;
  }
  if (s.kind == SpaceKind::SequenceLp) return kernels::dot(f.rep(), v.coeffs());
  auto w = to_coords(v);
  return kernels::dot(f.rep(), w);
}

double dual_norm(const DualFunctional& f) {
  require(f.valid(), ErrorKind::InvalidArgument, "dual_norm: null functional");
  const auto& s = f.space();
  if (s.kind == SpaceKind::HolderPath) {
    const std::size_t d = s.value_dim;
    auto e = f.rep();
    double n1 = std::sqrt(kernels::sum_sq(e.subspan(0, d)));
    double n2 = std::sqrt(kernels::sum_sq(e.subspan(d, d)));
    return std::max(std::fabs(f.atom()->a) * n1, std::fabs(f.atom()->b) * n2);
  }
  return coords_dual_norm(f.rep(), s.dual_exponent(), s.block_size());
}

DualFunctional project_to_dual_ball(const DualFunctional& f) {
  require(f.valid(), ErrorKind::InvalidArgument, "project: null functional");
  const auto& s = f.space();
  std::vector<double> r(f.rep().begin(), f.rep().end());
  if (s.kind == SpaceKind::HolderPath) {
    const std::size_t d = s.value_dim;
    HolderAtom a = *f.atom();
    for (int part = 0; part < 2; ++part) {
      std::span<double> e(r.data() + part * d, d);
      double n = std::sqrt(kernels::sum_sq(e));
      if (n > 0.0) {
        for (double& x : e) x /= n;
        (part == 0 ? a.a : a.b) *= n;
      }
    }
    a.a = std::clamp(a.a, -1.0, 1.0);
    a.b = std::clamp(a.b, -1.0, 1.0);
    return DualFunctional(f.space_ptr(), a, std::move(r));
  }
  const double pd = s.dual_exponent();
  const std::size_t blk = s.block_size();
  if (std::isinf(pd)) {
    if (blk == 1) {
      for (double& x : r) x = std::clamp(x, -1.0, 1.0);
    } else {
      for (std::size_t i = 0; i < r.size(); i += blk) {
        double n = std::sqrt(kernels::sum_sq(std::span<const double>(r.data() + i, blk)));
        if (n > 1.0)
          for (std::size_t c = 0; c < blk; ++c) r[i + c] /= n;
      }
    }
  } else {
    double n = coords_norm(r, pd, blk);
    if (n > 1.0)
      for (double& x : r) x /= n;
  }
  return DualFunctional(f.space_ptr(), std::move(r));
}

DualFunctional norming_functional(const BanachVector& v) {
  const auto& s = v.space();
  if (s.kind == SpaceKind::HolderPath) {
    const std::size_t n = s.grid.size(), d = s.value_dim;
    auto c = v.coeffs();
    HolderAtom a;
    std::vector<double> dir(2 * d, 0.0);
    double best = -1.0;
    for (std::size_t t = 0; t < n; ++t) {
      double m = std::sqrt(kernels::sum_sq(c.subspan(t * d, d)));
      if (m > best) {
        best = m;
        a.t = t;
      }
    }
    if (best > 0.0) {
      a.a = 1.0;
      for (std::size_t i = 0; i < d; ++i) dir[i] = c[a.t * d + i] / best;
    } else {
      dir[0] = 1.0;
    }
    if (s.delta > 0.0) {
      double hb = -1.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
          double sq = 0.0;
          for (std::size_t k = 0; k < d; ++k) {
            double df = c[j * d + k] - c[i * d + k];
            sq += df * df;
          }
          double val = std::sqrt(sq) * std::pow(s.grid[j] - s.grid[i], -s.delta);
          if (val > hb) {
            hb = val;
            a.s = j;
            a.u = i;
          }
        }
      double dn = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        dir[d + k] = c[a.s * d + k] - c[a.u * d + k];
        dn += dir[d + k] * dir[d + k];
      }
      dn = std::sqrt(dn);
      if (dn > 0.0) {
        a.b = 1.0;
        for (std::size_t k = 0; k < d; ++k) dir[d + k] /= dn;
      } else {
        dir[d] = 1.0;
        a.s = 1;
        a.u = 0;
      }
    } else {
      dir[d] = 1.0;
    }
    return DualFunctional(v.space_ptr(), a, std::move(dir));
  }

  auto w = s.kind == SpaceKind::SequenceLp ? std::vector<double>(v.coeffs().begin(), v.coeffs().end())
                                           : to_coords(v);
  const std::size_t blk = s.block_size();
  const double p = s.p;
  const double nv = coords_norm(w, p, blk);
  std::vector<double> g(w.size(), 0.0);
  if (nv > 0.0) {
    for (std::size_t i = 0; i < w.size(); i += blk) {
      double bn = blk == 1 ? std::fabs(w[i]) : std::sqrt(kernels::sum_sq(std::span<const double>(w.data() + i, blk)));
      if (bn == 0.0) continue;
      // g_B = |w_B|^{p-1} w_B / (|w_B| ||w||^{p-1})
      double scale = (p == 1.0 ? 1.0 : std::pow(bn / nv, p - 1.0)) / bn;
      for (std::size_t c = 0; c < blk; ++c) g[i + c] = scale * w[i + c];
    }
  }
  return DualFunctional(v.space_ptr(), std::move(g));
}

BanachVector to_sequence(const BanachVector& v) {
  require(v.space().kind == SpaceKind::FemW1p1d, ErrorKind::Unsupported,
          "to_sequence needs a 1D FEM vector");
  auto w = to_coords(v);
  auto sp = make_sequence_space(w.size(), v.space().p);
  return BanachVector(std::move(sp), std::move(w));
}

BanachVector prolong(const BanachVector& v, const SpacePtr& target) {
  const auto& s = v.space();
  const auto& t = *target;
  require(s.kind == t.kind && s.kind != SpaceKind::SequenceLp, ErrorKind::SpaceMismatch,
          "prolong: incompatible spaces");
  require(s.value_dim == t.value_dim, ErrorKind::SpaceMismatch, "prolong: value_dim differs");
  auto c = v.coeffs();
  std::vector<double> out(t.dimension(), 0.0);
  auto interp1 = [&](double x, std::size_t comp, std::size_t d) {
    std::size_t e = locate_cell(s.grid, x);
    double h = s.grid[e + 1] - s.grid[e];
    double lam = std::clamp((x - s.grid[e]) / h, 0.0, 1.0);
    return (1.0 - lam) * c[e * d + comp] + lam * c[(e + 1) * d + comp];
  };
  if (s.kind == SpaceKind::FemW1p2d) {
    const std::size_t m = s.grid.size(), mt = t.grid.size();
    for (std::size_t j = 0; j < mt; ++j) {
      double y = t.grid[j];
      std::size_t cj = locate_cell(s.grid, y);
      double eta = std::clamp((y - s.grid[cj]) / (s.grid[cj + 1] - s.grid[cj]), 0.0, 1.0);
      for (std::size_t i = 0; i < mt; ++i) {
        double x = t.grid[i];
        std::size_t ci = locate_cell(s.grid, x);
        double xi = std::clamp((x - s.grid[ci]) / (s.grid[ci + 1] - s.grid[ci]), 0.0, 1.0);
        double v00 = c[cj * m + ci], v10 = c[cj * m + ci + 1];
        double v01 = c[(cj + 1) * m + ci], v11 = c[(cj + 1) * m + ci + 1];
        out[j * mt + i] = xi >= eta ? v00 + xi * (v10 - v00) + eta * (v11 - v10)
                                    : v00 + eta * (v01 - v00) + xi * (v11 - v01);
      }
    }
  } else {
    const std::size_t d = s.kind == SpaceKind::HolderPath ? s.value_dim : 1;
    for (std::size_t i = 0; i < t.grid.size(); ++i)
      for (std::size_t comp = 0; comp < d; ++comp) out[i * d + comp] = interp1(t.grid[i], comp, d);
  }
  // Snap constrained nodes so rounding cannot break the boundary invariant.
  if (t.kind == SpaceKind::FemW1p1d && t.boundary != Boundary::None) {
    out.front() = 0.0;
    if (t.boundary == Boundary::DirichletAll) out.back() = 0.0;
  }
  if (t.kind == SpaceKind::FemW1p2d && t.boundary == Boundary::DirichletAll) {
    const std::size_t m = t.grid.size();
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t i = 0; i < m; ++i)
        if (i == 0 || j == 0 || i + 1 == m || j + 1 == m) out[j * m + i] = 0.0;
  }
  return BanachVector(target, std::move(out));
}

double lp_norm_p1(const BanachVector& v, double p) {
  const auto& s = v.space();
  require(s.kind == SpaceKind::FemW1p1d, ErrorKind::Unsupported, "lp_norm_p1 needs a 1D FEM vector");
  static const double r = std::sqrt(0.6);
  static const double xq[3] = {0.5 * (1.0 - r), 0.5, 0.5 * (1.0 + r)};
  static const double wq[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
  auto c = v.coeffs();
  double acc = 0.0;
  for (std::size_t e = 0; e + 1 < s.grid.size(); ++e) {
    double h = s.grid[e + 1] - s.grid[e];
    for (int q = 0; q < 3; ++q) acc += h * wq[q] * pow_abs((1.0 - xq[q]) * c[e] + xq[q] * c[e + 1], p);
  }
  return std::pow(acc, 1.0 / p);
}

}  // namespace bmc
