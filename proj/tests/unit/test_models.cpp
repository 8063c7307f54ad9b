#include "doctest.h"

#include <cmath>

#include "bmc/harness.hpp"
#include "bmc/models.hpp"

using namespace bmc;

namespace {

const auto kLeft = Boundary::DirichletLeftNeumannRight;

double max_diff(const BanachVector& a, const BanachVector& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_SUITE("models") {
TEST_CASE("1D FEM is nodally exact for constant data") {
  auto sp = make_fem1d_uniform(1.0, 8, 2.0, kLeft);
  auto u = fem1d_solve(std::vector<double>(8, 1.0), [](double) { return 1.0; }, sp);
  for (std::size_t i = 0; i < u.size(); ++i) {
    double x = sp->grid[i];
    CHECK(std::fabs(u[i] - (x - x * x / 2)) < 1e-12);
  }
  auto zero = fem1d_solve(std::vector<double>(8, 1.0), [](double) { return 0.0; }, sp);
  for (double c : zero.coeffs()) CHECK(c == 0.0);
  auto half = fem1d_solve(std::vector<double>(8, 2.0), [](double) { return 1.0; }, sp);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(half[i] == doctest::Approx(u[i] / 2).epsilon(1e-13));
}

TEST_CASE("log-Gaussian hierarchy with a deterministic field") {
  LogGaussConfig cfg;
  cfg.field.sigma = {0.0, 0.0};
  Elliptic1dLogGauss model(cfg);

  auto s1 = model.sample(1, {1, {}});
  for (double c : s1.coarse.coeffs()) CHECK(c == 0.0);

  std::vector<RatePoint> pts;
  for (int l = 3; l <= 8; ++l) {
    auto s = model.sample(l, {1, {std::uint64_t(l)}});
    auto exact = fem1d_solve(std::vector<double>(std::size_t(model.size(l)), 1.0), cfg.forcing, model.space(l));
    CHECK(max_diff(s.fine, exact) < 1e-12);
    pts.push_back({model.size(l), norm(s.fine.combine(1.0, s.coarse, -1.0))});
  }
  CHECK(rate_regression(pts).slope == doctest::Approx(-1.0).epsilon(0.1));
}

TEST_CASE("log-Gaussian solutions stay bounded") {
  LogGaussConfig cfg;
  cfg.field.sigma = {0.5, 0.25};
  cfg.p = 1.5;
  Elliptic1dLogGauss model(cfg);
  KlFieldConfig kl = cfg.field;
  const std::size_t n = 1000;
  const double kq = 4.0;
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    SeedSpec s{21, {i}};
    lhs += std::pow(norm(model.sample(5, s).fine), kq);
    Stream rng(s);
    auto xi = kl_draw_modes(kl, rng);
    rhs += std::pow(kl_field_eval(kl, model.space(1)->grid, xi).a_lo, -kq);
  }
  lhs = std::pow(lhs / n, 1 / kq);
  rhs = std::pow(rhs / n, 1 / kq);
  // |u|_{W^1_p} <= ||f||_{L_1} / a_lo for this boundary condition, and ||f||_{L_1} = 1.
  CHECK(lhs <= rhs * (1 + 1e-12));
}

TEST_CASE("2D Poisson solution has the symmetries of the square") {
  const std::size_t n = 8, m = n + 1;
  auto sp = make_fem2d_space(n, 2.0);
  auto u = fem2d_poisson_solve([](double, double) { return 1.0; }, sp);
  auto at = [&](std::size_t i, std::size_t j) { return u[i * m + j]; };
  double worst = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      double v = at(i, j);
      for (double w : {at(j, i), at(n - i, j), at(i, n - j), at(n - i, n - j), at(n - j, i), at(j, n - i),
                       at(n - j, n - i)})
        worst = std::max(worst, std::fabs(v - w));
    }
  CHECK(worst < 1e-10);
}

TEST_CASE("forcing model rates with deterministic data") {
  ForcingLaw law;
  EllipticForcing m1(law, 1, 2.0);
  std::vector<RatePoint> pts;
  for (int l = 2; l <= 7; ++l) {
    auto xs = m1.solve_levels({l, 10}, {1, {}});
    pts.push_back({m1.size(l), norm(m1.embed(xs[0], 10).combine(1.0, xs[1], -1.0))});
  }
  CHECK(rate_regression(pts).slope == doctest::Approx(-1.0).epsilon(0.1));

  EllipticForcing m2(law, 2, 2.0);
  pts.clear();
  for (int l = 1; l <= 4; ++l) {
    auto xs = m2.solve_levels({l, 6}, {1, {}});
    pts.push_back({m2.size(l), norm(m2.embed(xs[0], 6).combine(1.0, xs[1], -1.0))});
  }
  CHECK(rate_regression(pts).slope == doctest::Approx(-0.5).epsilon(0.2));
}

TEST_CASE("Euler-Maruyama special cases") {
  SdeSpec zero{"zero", {}, {1.5}, 1.0};
  auto out = make_holder_uniform(1.0, 16, 0.0);
  auto p0 = em_path(zero, 8, std::vector<double>(8, 0.3), out);
  for (double c : p0.coeffs()) CHECK(c == 1.5);

  SdeSpec drift{"const_drift", {1.0}, {0.0}, 1.0};
  auto p1 = em_path(drift, 4, std::vector<double>(4, 0.0), out);
  for (std::size_t i = 0; i < p1.size(); ++i) CHECK(p1[i] == doctest::Approx(out->grid[i]).epsilon(1e-14));
}

TEST_CASE("increment coarsening and bridge refinement") {
  auto c = coarsen_increments({0.3, -0.1, 0.2, 0.4}, 2);
  REQUIRE(c.size() == 2);
  CHECK(c[0] == doctest::Approx(0.2));
  CHECK(c[1] == doctest::Approx(0.6));

  Stream rng(SeedSpec{4, {}});
  std::vector<double> coarse{0.5, -1.0, 0.25};
  auto fine = bridge_refine(coarse, 4, 1.0 / 12, rng);
  REQUIRE(fine.size() == 12);
  auto back = coarsen_increments(fine, 4);
  for (std::size_t i = 0; i < 3; ++i) CHECK(back[i] == doctest::Approx(coarse[i]).epsilon(1e-14));
}

TEST_CASE("GBM strong error at the nodes decays at rate one half") {
  SdeSpec gbm{"gbm", {0.0, 1.0}, {1.0}, 1.0};
  const std::size_t R = 400, Nmax = 1024;
  std::vector<RatePoint> pts;
  std::vector<double> err2(7, 0.0);
  for (std::size_t r = 0; r < R; ++r) {
    Stream rng(SeedSpec{8, {r}});
    std::vector<double> dB(Nmax);
    for (double& x : dB) x = rng.normal() * std::sqrt(1.0 / Nmax);
    for (int j = 0; j < 7; ++j) {
      std::size_t N = std::size_t(16) << j;
      auto inc = coarsen_increments(dB, Nmax / N);
      auto y = em_nodes(gbm, N, inc);
      auto x = gbm_exact_nodes(1.0, 0.0, 1.0, 1.0, inc);
      double e = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) e = std::max(e, std::fabs(y[i] - x[i]));
      err2[j] += e * e / R;
    }
  }
  for (int j = 0; j < 7; ++j) pts.push_back({double(16 << j), std::sqrt(err2[j])});
  CHECK(rate_regression(pts).slope == doctest::Approx(-0.5).epsilon(0.2));
}

TEST_CASE("SDE level coupling with a deterministic ODE") {
  SdeHierarchyConfig cfg;
  cfg.spec = SdeSpec{"linear", {1.0, 0.0, 0.0, 0.0}, {1.0}, 1.0};
  cfg.output_level = 9;
  SdeHierarchy model(cfg);
  std::vector<RatePoint> pts;
  for (int l = 2; l <= 7; ++l) {
    auto s = model.sample(l, {2, {}});
    pts.push_back({model.size(l), norm(s.fine.combine(1.0, s.coarse, -1.0))});
  }
  CHECK(rate_regression(pts).slope == doctest::Approx(-1.0).epsilon(0.1));
}
}
