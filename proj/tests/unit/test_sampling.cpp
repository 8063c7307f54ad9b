#include "doctest.h"

#include <cmath>
#include <numbers>

#include "bmc/sampling.hpp"

using namespace bmc;

TEST_SUITE("sampling") {
TEST_CASE("seed paths are reproducible and distinct") {
  SeedSpec s{42, {1, 2}};
  CHECK(draw_family(FamilyKind::Gaussian, 4, s) == draw_family(FamilyKind::Gaussian, 4, s));
  CHECK(draw_family(FamilyKind::Gaussian, 4, s) != draw_family(FamilyKind::Gaussian, 4, s.child(0)));
  CHECK(SeedSpec{42, {1, 2}}.key() != SeedSpec{42, {2, 1}}.key());
  CHECK(SeedSpec{42, {0}}.key() != SeedSpec{42, {}}.key());
  CHECK(s.to_string() == "42/1/2");
}

TEST_CASE("family moments") {
  const std::size_t M = 1000000;
  auto r = draw_family(FamilyKind::Rademacher, M, {1, {}});
  double mean = 0.0;
  for (double x : r) {
    CHECK_UNARY(std::fabs(x) == 1.0);
    mean += x;
  }
  CHECK(std::fabs(mean / M) < 4.0 / std::sqrt(double(M)));

  auto g = draw_family(FamilyKind::Gaussian, M, {2, {}});
  double m1 = 0.0, m2 = 0.0;
  for (double x : g) {
    m1 += x;
    m2 += x * x;
  }
  m1 /= M;
  double var = m2 / M - m1 * m1;
  CHECK(var > 0.99);
  CHECK(var < 1.01);
}

TEST_CASE("KL field with zero amplitudes is the constant one") {
  KlFieldConfig cfg;
  cfg.sigma = {0.0, 0.0, 0.0};
  std::vector<double> grid{0, 0.25, 0.5, 0.75, 1.0};
  auto s = kl_field_sample(cfg, grid, {3, {}});
  for (double g : s.g_nodes) CHECK(g == 0.0);
  for (double a : s.a_mid) CHECK(a == 1.0);
  CHECK(s.a_lo == 1.0);
  CHECK(s.a_hi == 1.0);
  CHECK(s.a_prime_hi == 0.0);
}

TEST_CASE("KL extrema of a single cosine") {
  KlFieldConfig cfg;
  cfg.sigma = {1.0};
  std::vector<double> grid{0, 0.5, 1.0};
  auto s = kl_field_eval(cfg, grid, {1.0});
  CHECK(s.g_nodes[0] == doctest::Approx(1.0));
  CHECK(s.g_nodes[1] == doctest::Approx(0.0));
  CHECK(s.a_hi == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
  CHECK(s.a_lo == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  // max of e^{cos(pi x)} pi |sin(pi x)|: stationary where cos = (sqrt5 - 1)/2.
  double c = (std::sqrt(5.0) - 1) / 2;
  double expect = std::exp(c) * std::numbers::pi * std::sqrt(1 - c * c);
  CHECK(s.a_prime_hi == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("KL breakpoints must be grid nodes") {
  KlFieldConfig cfg;
  cfg.sigma = {1.0};
  cfg.breakpoints = {0.0, 0.3, 1.0};
  CHECK_THROWS(kl_field_eval(cfg, {0, 0.5, 1.0}, {1.0}));
  auto s = kl_field_eval(cfg, {0, 0.3, 1.0}, {1.0});
  CHECK(s.a_hi_part.size() == 2);
}

TEST_CASE("inverse coefficient moments stabilize") {
  KlFieldConfig cfg;
  cfg.sigma = {0.5, 0.25, 0.125};
  cfg.oversample = 4;
  std::vector<double> grid{0, 0.25, 0.5, 0.75, 1.0};
  const std::size_t n = 20000;
  std::vector<double> lo(n);
  for (std::size_t i = 0; i < n; ++i) lo[i] = kl_field_sample(cfg, grid, SeedSpec{9, {i}}).a_lo;
  for (double q : {1.0, 2.0, 4.0}) {
    // The two halves estimate the same finite mean: their gap is a few standard errors.
    double s[2] = {0, 0}, s2[2] = {0, 0};
    for (std::size_t i = 0; i < n; ++i) {
      double v = std::pow(lo[i], -q);
      s[i % 2] += v;
      s2[i % 2] += v * v;
    }
    const double h = double(n / 2);
    double m0 = s[0] / h, m1 = s[1] / h;
    double se = std::sqrt((s2[0] / h - m0 * m0 + s2[1] / h - m1 * m1) / h);
    CHECK(std::isfinite(m0 + m1));
    CHECK(std::fabs(m0 - m1) <= 4 * se);
    CHECK(se < 0.25 * m0);
  }
}

TEST_CASE("uniform basis variable") {
  for (std::uint64_t i = 0; i < 20; ++i) CHECK(uniform_basis_sample(1, {i, {}})[0] == 1.0);
  const std::size_t draws = 100000;
  std::vector<double> freq(4, 0.0);
  for (std::size_t i = 0; i < draws; ++i) {
    auto e = uniform_basis_sample(4, {5, {i}});
    for (std::size_t j = 0; j < 4; ++j) freq[j] += e[j];
  }
  for (double f : freq) CHECK(std::fabs(f / draws - 0.25) < 0.01);
}

TEST_CASE("Khintchine pieces") {
  CHECK(rademacher_lq_exact({1, 1}, 2.0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(khintchine_lower(2.0) == doctest::Approx(1.0));
  CHECK(khintchine_upper(2.0) == doctest::Approx(1.0));
  CHECK(khintchine_lower(1.0) == doctest::Approx(1 / std::sqrt(2.0)));
  // ||r_1 + r_2 + r_3||_1 = (3 * 2 + 1 * 6) / 8.
  CHECK(rademacher_lq_exact({1, 1, 1}, 1.0) == doctest::Approx(1.5));
}

TEST_CASE("property suite passes on a small run") {
  auto rep = probabilistic_property_suite(10000, {17, {}});
  for (const auto& c : rep.checks) {
    INFO(c.name << ": " << c.lhs << " vs " << c.rhs << " " << c.detail);
    CHECK(c.pass);
  }
  CHECK(rep.all_pass());
}
}
