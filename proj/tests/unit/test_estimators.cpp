#include "doctest.h"

#include <cmath>

#include "bmc/estimators.hpp"
#include "bmc/harness.hpp"

using namespace bmc;

namespace {

BanachVector e(const SpacePtr& sp, std::size_t i) {
  std::vector<double> c(sp->dimension(), 0.0);
  c[i] = 1.0;
  return BanachVector(sp, c);
}

ReferenceMoment power_ref(int k, const BanachVector& x) {
  ReferenceMoment ref;
  ref.rep = SymmetricTensorRep(k, x.space_ptr());
  ref.rep.add(1.0, x);
  return ref;
}

}  // namespace

TEST_SUITE("estimators") {
TEST_CASE("constant sampler reproduces the power") {
  auto sp = make_sequence_space(3, 2.0);
  BanachVector x(sp, {1, -2, 0.5});
  for (int k : {1, 2, 3}) {
    for (std::size_t M : {1u, 7u}) {
      auto est = mc_kth_moment(constant_sampler(x), k, M, {1, {}});
      auto ref = power_ref(k, x);
      CHECK(error_in_norm(est, ref, NormKind::PiUpper) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
      CHECK(error_in_norm(est, ref, NormKind::EpsS) <= 1e-12);
      CHECK(max_abs_diff(to_dense(est.flatten(sp)), to_dense(ref.rep)) < 1e-13);
    }
  }
}

TEST_CASE("uniform basis estimator is unbiased over all outcomes") {
  auto sp = make_sequence_space(2, 2.0);
  for (std::size_t M = 1; M <= 10; ++M) {
    std::vector<double> mean(4, 0.0);
    const std::size_t outcomes = std::size_t(1) << M;
    for (std::size_t w = 0; w < outcomes; ++w) {
      std::vector<BanachVector> xs;
      for (std::size_t j = 0; j < M; ++j) xs.push_back(e(sp, (w >> j) & 1));
      auto d = to_dense(mc_from_samples(2, xs).flatten(sp));
      for (std::size_t i = 0; i < 4; ++i) mean[i] += d.entries()[i] / double(outcomes);
    }
    CHECK(std::fabs(mean[0] - 0.5) < 1e-12);
    CHECK(std::fabs(mean[3] - 0.5) < 1e-12);
    CHECK(std::fabs(mean[1]) < 1e-12);
  }
}

TEST_CASE("single level MLMC is standard MC on level one") {
  LogGaussConfig cfg;
  cfg.field.sigma = {0.5, 0.25};
  Elliptic1dLogGauss model(cfg);
  SeedSpec seed{3, {}};
  auto ml = mlmc_estimate(model, 2, {50}, seed);
  Sampler level1 = [&](const SeedSpec& s) { return model.sample(1, s).fine; };
  auto mc = mc_kth_moment(level1, 2, 50, seed.child(1));
  auto sp = model.space(1);
  CHECK(max_abs_diff(to_dense(ml.flatten(sp)), to_dense(mc.flatten(sp))) < 1e-14);
}

TEST_CASE("deterministic model gives the exact power at any allocation") {
  LogGaussConfig cfg;
  cfg.field.sigma = {0.0};
  Elliptic1dLogGauss model(cfg);
  auto XL = model.solve_levels({4}, {0, {}})[0];
  for (int k : {1, 2}) {
    auto est = mlmc_estimate(model, k, {3, 1, 2, 1}, {5, {}});
    CHECK(max_abs_diff(to_dense(est.flatten(model.space(4))), to_dense(power_ref(k, XL).rep)) < 1e-13);
  }
  auto c = mlmc_estimate(model, 2, {200, 100, 50, 40}, {5, {}}, true);
  CHECK(max_abs_diff(to_dense(c.flatten(model.space(4))), to_dense(power_ref(2, XL).rep)) < 1e-12);
}

TEST_CASE("Gram compression does not change the estimate") {
  LogGaussConfig cfg;
  cfg.field.sigma = {0.5, 0.25};
  Elliptic1dLogGauss model(cfg);
  std::vector<std::size_t> M{400, 100, 30};
  auto plain = mlmc_estimate(model, 2, M, {6, {}});
  auto packed = mlmc_estimate(model, 2, M, {6, {}}, true);
  CHECK(packed.rank() < plain.rank());
  auto sp = model.space(3);
  CHECK(max_abs_diff(to_dense(plain.flatten(sp)), to_dense(packed.flatten(sp))) < 1e-12);
}

TEST_CASE("error of the reference against itself is zero") {
  auto sp = make_sequence_space(3, 2.0);
  auto est = mc_kth_moment(gaussian_sampler(3, 2.0), 2, 20, {2, {}});
  ReferenceMoment ref;
  ref.rep = est.flatten(sp);
  for (auto kind : {NormKind::EpsS, NormKind::PiUpper, NormKind::HilbertK2Exact, NormKind::HilbertK2Nuclear})
    CHECK(error_in_norm(est, ref, kind) < 1e-12);
}

TEST_CASE("Lq error aggregation") {
  auto same = lq_error(std::vector<double>(10, 0.3), 2.0);
  CHECK(same.value == doctest::Approx(0.3));
  CHECK(same.standard_error == 0.0);

  // |Z| with Z standard normal has L_2 norm 1.
  auto z = draw_family(FamilyKind::Gaussian, 64, {12, {}});
  for (double& v : z) v = std::fabs(v);
  auto r = lq_error(z, 2.0);
  CHECK(r.standard_error > 0.0);
  CHECK(std::fabs(r.value - 1.0) <= 3 * r.standard_error);
}

TEST_CASE("Gaussian mean converges at rate one half") {
  ReferenceMoment ref;
  auto sp = make_sequence_space(4, 2.0);
  ref.rep = SymmetricTensorRep(1, sp);
  auto res = mc_rate_experiment(gaussian_sampler(4, 2.0), ref, 1, {16, 64, 256, 1024, 4096}, 64, 2.0,
                                NormKind::EpsS, {4, {}});
  CHECK(res.fit.slope == doctest::Approx(-0.5).epsilon(0.1));
}
}
