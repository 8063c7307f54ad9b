#include <cmath>
#include <numbers>

#include "bmc/error.hpp"
#include "bmc/models.hpp"

namespace bmc {

namespace {

constexpr int kCachedLevels = 16;

const double kGaussX[3] = {0.5 * (1.0 - std::sqrt(0.6)), 0.5, 0.5 * (1.0 + std::sqrt(0.6))};
const double kGaussW[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

void check_level(int level) {
  require(level >= 0 && level <= 30, ErrorKind::InvalidArgument, "level out of range [0, 30]");
}

}  // namespace

BanachVector fem1d_solve(const std::vector<double>& a_elem, const ScalarFn& f, const SpacePtr& space,
                         double* work) {
  const auto& s = *space;
  require(s.kind == SpaceKind::FemW1p1d, ErrorKind::SpaceMismatch, "fem1d_solve needs a 1D FEM space");
  require(s.boundary != Boundary::None, ErrorKind::Unsupported, "pure Neumann problem is singular");
  const std::size_t ne = s.grid.size() - 1;
  require(a_elem.size() == ne, ErrorKind::DimensionMismatch, "one coefficient value per element expected");
  for (double a : a_elem)
    require(a > 0.0 && std::isfinite(a), ErrorKind::InvalidArgument, "coefficient must be positive");

  // Full system on nodes 0..ne, then the constrained rows are dropped.
  std::vector<double> diag(ne + 1, 0.0), off(ne, 0.0), rhs(ne + 1, 0.0);
  for (std::size_t e = 0; e < ne; ++e) {
    double x0 = s.grid[e], h = s.grid[e + 1] - x0;
    double k = a_elem[e] / h;
    diag[e] += k;
    diag[e + 1] += k;
    off[e] -= k;
    for (int q = 0; q < 3; ++q) {
      double fx = f(x0 + kGaussX[q] * h) * kGaussW[q] * h;
      rhs[e] += fx * (1.0 - kGaussX[q]);
      rhs[e + 1] += fx * kGaussX[q];
    }
  }
  const std::size_t first = 1;
  const std::size_t last = s.boundary == Boundary::DirichletAll ? ne - 1 : ne;
  std::vector<double> u(ne + 1, 0.0);
  if (last >= first) {
    // Thomas algorithm on rows first..last.
    const std::size_t m = last - first + 1;
    std::vector<double> c(m, 0.0), d(m, 0.0);
    double denom = diag[first];
    require(denom > 0.0, ErrorKind::Numerical, "stiffness matrix is singular");
    c[0] = m > 1 ? off[first] / denom : 0.0;
    d[0] = rhs[first] / denom;
    for (std::size_t i = 1; i < m; ++i) {
      std::size_t r = first + i;
      denom = diag[r] - off[r - 1] * c[i - 1];
      require(denom > 0.0, ErrorKind::Numerical, "stiffness matrix is singular");
      c[i] = i + 1 < m ? off[r] / denom : 0.0;
      d[i] = (rhs[r] - off[r - 1] * d[i - 1]) / denom;
    }
    u[last] = d[m - 1];
    for (std::size_t i = m - 1; i-- > 0;) u[first + i] = d[i] - c[i] * u[first + i + 1];
    if (work) *work = double(m);
  } else if (work) {
    *work = 0.0;
  }
  return BanachVector(space, std::move(u));
}

BanachVector fem2d_poisson_solve(const std::function<double(double, double)>& f, const SpacePtr& space,
                                 int* iterations, double tol) {
  const auto& s = *space;
  require(s.kind == SpaceKind::FemW1p2d, ErrorKind::SpaceMismatch, "fem2d solve needs a 2D FEM space");
  require(s.uniform_grid(), ErrorKind::Unsupported, "2D solver needs a uniform lattice");
  const std::size_t m = s.grid.size(), n = m - 1;
  const double h = 1.0 / double(n);
  std::vector<double> b(m * m, 0.0);
  // Load vector: edge-midpoint rule on every triangle (exact for quadratics).
  const double w = h * h / 2.0 / 3.0;
  auto add_triangle = [&](std::size_t i0, std::size_t j0, std::size_t i1, std::size_t j1, std::size_t i2,
                          std::size_t j2) {
    std::size_t nodes[3] = {j0 * m + i0, j1 * m + i1, j2 * m + i2};
    double xs[3] = {s.grid[i0], s.grid[i1], s.grid[i2]}, ys[3] = {s.grid[j0], s.grid[j1], s.grid[j2]};
    for (int a = 0; a < 3; ++a)
      for (int c = a + 1; c < 3; ++c) {
        double fm = f(0.5 * (xs[a] + xs[c]), 0.5 * (ys[a] + ys[c])) * w * 0.5;
        b[nodes[a]] += fm;
        b[nodes[c]] += fm;
      }
  };
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      add_triangle(i, j, i + 1, j, i + 1, j + 1);
      add_triangle(i, j, i + 1, j + 1, i, j + 1);
    }

  // The P1 stiffness on this mesh is the 5-point stencil (4, -1, -1, -1, -1).
  auto interior = [&](std::size_t i, std::size_t j) { return i > 0 && j > 0 && i < n && j < n; };
  auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t i = 0; i < m; ++i) {
        std::size_t k = j * m + i;
        if (!interior(i, j)) {
          y[k] = 0.0;
          continue;
        }
        y[k] = 4.0 * x[k] - x[k - 1] - x[k + 1] - x[k - m] - x[k + m];
      }
  };
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < m; ++i)
      if (!interior(i, j)) b[j * m + i] = 0.0;

  std::vector<double> x(m * m, 0.0), r = b, p = b, Ap(m * m);
  double rr = 0.0, bb = 0.0;
  for (double v : r) rr += v * v;
  bb = rr;
  int it = 0;
  const int max_it = int(20 * n + 200);
  while (rr > tol * tol * bb && bb > 0.0) {
    if (it >= max_it) fail(ErrorKind::Numerical, "CG did not converge within " + std::to_string(max_it) + " iterations");
    apply(p, Ap);
    double pAp = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) pAp += p[k] * Ap[k];
    double alpha = rr / pAp;
    double rr_new = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      x[k] += alpha * p[k];
      r[k] -= alpha * Ap[k];
      rr_new += r[k] * r[k];
    }
    double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = r[k] + beta * p[k];
    ++it;
  }
  if (iterations) *iterations = it;
  return BanachVector(space, std::move(x));
}

// ---------------------------------------------------------------------------

Elliptic1dLogGauss::Elliptic1dLogGauss(LogGaussConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.field.validate();
  require(cfg_.base_elements >= 1, ErrorKind::InvalidArgument, "base_elements must be >= 1");
  for (int l = 0; l <= kCachedLevels; ++l)
    spaces_.push_back(make_fem1d_uniform(cfg_.field.length, cfg_.base_elements << l, cfg_.p,
                                         Boundary::DirichletLeftNeumannRight));
  // Partition breakpoints must be nodes of every level, so of level 1.
  std::vector<double> xi(cfg_.field.sigma.size(), 0.0);
  kl_field_eval(cfg_.field, space(1)->grid, xi);
}

SpacePtr Elliptic1dLogGauss::space(int level) const {
  check_level(level);
  if (level <= kCachedLevels) return spaces_[std::size_t(level)];
  return make_fem1d_uniform(cfg_.field.length, cfg_.base_elements << level, cfg_.p,
                            Boundary::DirichletLeftNeumannRight);
}

double Elliptic1dLogGauss::size(int level) const { return double(cfg_.base_elements) * std::ldexp(1.0, level); }

BanachVector Elliptic1dLogGauss::solve_with_modes(int level, const std::vector<double>& xi, double* work) const {
  SpacePtr sp = space(level);
  const auto& g = sp->grid;
  std::vector<double> a(g.size() - 1);
  for (std::size_t e = 0; e < a.size(); ++e) a[e] = std::exp(kl_g(cfg_.field, xi, 0.5 * (g[e] + g[e + 1])));
  return fem1d_solve(a, cfg_.forcing, sp, work);
}

std::vector<BanachVector> Elliptic1dLogGauss::solve_levels(const std::vector<int>& levels, const SeedSpec& seed,
                                                           double* work) const {
  Stream rng(seed);
  std::vector<double> xi = kl_draw_modes(cfg_.field, rng);
  std::vector<BanachVector> out;
  double total = 0.0;
  for (int l : levels) {
    double w = 0.0;
    out.push_back(solve_with_modes(l, xi, &w));
    total += w;
  }
  if (work) *work = total;
  return out;
}

// ---------------------------------------------------------------------------

EllipticForcing::EllipticForcing(ForcingLaw law, int dim, double p, std::size_t base_cells)
    : law_(std::move(law)), dim_(dim), p_(p), base_(base_cells) {
  require(dim == 1 || dim == 2, ErrorKind::InvalidArgument, "forcing model supports dim 1 or 2");
  require(base_ >= 1, ErrorKind::InvalidArgument, "base_cells must be >= 1");
  require(law_.eta == ForcingLaw::Eta::Gaussian || law_.dof > 2.0, ErrorKind::InvalidArgument,
          "Student-t forcing needs dof > 2");
  const int cached = dim == 1 ? kCachedLevels : 10;
  for (int l = 0; l <= cached; ++l)
    spaces_.push_back(dim == 1 ? make_fem1d_uniform(1.0, base_ << l, p, Boundary::DirichletAll)
                               : make_fem2d_space(base_ << l, p));
}

SpacePtr EllipticForcing::space(int level) const {
  check_level(level);
  if (std::size_t(level) < spaces_.size()) return spaces_[std::size_t(level)];
  return dim_ == 1 ? make_fem1d_uniform(1.0, base_ << level, p_, Boundary::DirichletAll)
                   : make_fem2d_space(base_ << level, p_);
}

double EllipticForcing::size(int level) const {
  double n = double(base_) * std::ldexp(1.0, level);
  return dim_ == 1 ? n : n * n;
}

std::vector<BanachVector> EllipticForcing::solve_levels(const std::vector<int>& levels, const SeedSpec& seed,
                                                        double* work) const {
  Stream rng(seed);
  std::vector<double> eta(law_.amplitudes.size());
  std::student_t_distribution<double> st(law_.dof);
  for (std::size_t m = 0; m < eta.size(); ++m)
    eta[m] = law_.amplitudes[m] * (law_.eta == ForcingLaw::Eta::Gaussian ? rng.normal() : st(rng.engine()));
  const double pi = std::numbers::pi;
  std::vector<BanachVector> out;
  double total = 0.0;
  for (int l : levels) {
    SpacePtr sp = space(l);
    if (dim_ == 1) {
      auto f = [&](double x) {
        double v = law_.mean;
        for (std::size_t m = 0; m < eta.size(); ++m) v += eta[m] * std::sin(double(m + 1) * pi * x);
        return v;
      };
      double w = 0.0;
      out.push_back(fem1d_solve(std::vector<double>(sp->grid.size() - 1, 1.0), f, sp, &w));
      total += w;
    } else {
      auto f = [&](double x, double y) {
        double v = law_.mean;
        for (std::size_t m = 0; m < eta.size(); ++m)
          v += eta[m] * std::sin(double(m + 1) * pi * x) * std::sin(double(m + 1) * pi * y);
        return v;
      };
      int iters = 0;
      out.push_back(fem2d_poisson_solve(f, sp, &iters));
      double unknowns = double(sp->grid.size() - 2) * double(sp->grid.size() - 2);
      total += unknowns * double(std::max(iters, 1));
    }
  }
  if (work) *work = total;
  return out;
}

}  // namespace bmc
