#include "doctest.h"

#include <cmath>
#include <random>

#include "bmc/error.hpp"
#include "bmc/spaces.hpp"

using namespace bmc;

TEST_SUITE("spaces") {
TEST_CASE("norms on hand examples") {
  CHECK(norm(BanachVector(make_sequence_space(3, 2.0), {3, 4, 0})) == doctest::Approx(5.0).epsilon(1e-15));

  auto fem = make_fem1d_uniform(1.0, 2, 2.0, Boundary::DirichletLeftNeumannRight);
  CHECK(norm(BanachVector(fem, {0, 0.5, 1})) == doctest::Approx(1.0).epsilon(1e-15));

  auto hold = make_holder_uniform(1.0, 16, 0.5);
  std::vector<double> t(hold->grid);
  CHECK(norm(BanachVector(hold, t)) == doctest::Approx(2.0).epsilon(1e-14));

  // delta = 0 is the sup-norm alone.
  auto sup = make_holder_uniform(1.0, 16, 0.0);
  CHECK(norm(BanachVector(sup, t)) == doctest::Approx(1.0));
}

TEST_CASE("constructor validates length and boundary values") {
  auto sp = make_sequence_space(3, 2.0);
  CHECK_THROWS_AS(BanachVector(sp, {1, 2}), Error);
  auto fem = make_fem1d_uniform(1.0, 2, 2.0, Boundary::DirichletLeftNeumannRight);
  CHECK_THROWS_AS(BanachVector(fem, {1, 0, 0}), Error);
}

TEST_CASE("dual pairing") {
  auto sp = make_sequence_space(3, 2.0);
  BanachVector v(sp, {3, 4, 0});
  CHECK(dual_pair(DualFunctional(sp, {1, 0, 0}), v) == 3.0);

  auto hold = make_holder_uniform(1.0, 8, 0.5);
  std::vector<double> sq(hold->grid);
  for (double& x : sq) x *= x;
  DualFunctional eval(hold, HolderAtom{4, 1.0, 0, 0, 0.0}, {1.0, 0.0});
  CHECK(dual_pair(eval, BanachVector(hold, sq)) == doctest::Approx(0.25));

  // Equality case of Hölder's inequality in l_3.
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  auto l3 = make_sequence_space(6, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> c(6);
    for (double& x : c) x = nd(rng);
    BanachVector x(l3, c);
    DualFunctional f = norming_functional(x);
    CHECK(dual_norm(f) <= 1.0 + 1e-12);
    CHECK(dual_pair(f, x) == doctest::Approx(norm(x)).epsilon(1e-12));
  }
}

TEST_CASE("FEM to sequence keeps the norm") {
  auto fem = make_fem1d_uniform(1.0, 2, 2.0, Boundary::DirichletAll);
  BanachVector s = to_sequence(BanachVector(fem, {0, 1, 0}));
  REQUIRE(s.size() == 2);
  CHECK(s[0] == doctest::Approx(std::sqrt(0.5) * 2));
  CHECK(s[1] == doctest::Approx(-std::sqrt(0.5) * 2));
  // |u|_{W^1_2}^2 = 4 * (1/2) + 4 * (1/2) = 4.
  CHECK(norm(s) == doctest::Approx(2.0));

  BanachVector z = to_sequence(BanachVector::zero(fem));
  for (double c : z.coeffs()) CHECK(c == 0.0);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (double p : {1.5, 2.0, 3.0}) {
    auto sp = make_fem1d_uniform(2.0, 9, p, Boundary::DirichletLeftNeumannRight);
    std::vector<double> c(sp->dimension());
    for (std::size_t i = 1; i < c.size(); ++i) c[i] = u(rng);
    BanachVector v(sp, c);
    CHECK(norm(to_sequence(v)) == doctest::Approx(norm(v)).epsilon(1e-13));
  }
}

TEST_CASE("prolongation preserves P1 functions") {
  auto coarse = make_fem1d_uniform(1.0, 4, 2.0, Boundary::DirichletLeftNeumannRight);
  auto fine = make_fem1d_uniform(1.0, 16, 2.0, Boundary::DirichletLeftNeumannRight);
  BanachVector v(coarse, {0, 0.3, -0.2, 0.5, 0.1});
  BanachVector w = prolong(v, fine);
  CHECK(norm(w) == doctest::Approx(norm(v)).epsilon(1e-13));
  CHECK(w[4] == doctest::Approx(0.3));
  CHECK(w[6] == doctest::Approx(0.05));
}

TEST_CASE("L2 quadrature is exact for P1") {
  auto sp = make_fem1d_uniform(1.0, 1, 2.0, Boundary::DirichletLeftNeumannRight);
  // u(x) = x on [0,1]: ||u||_{L_2} = 1/sqrt(3).
  CHECK(lp_norm_p1(BanachVector(sp, {0, 1}), 2.0) == doctest::Approx(1 / std::sqrt(3.0)).epsilon(1e-14));
}
}
