#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include "bmc/error.hpp"
#include "bmc/harness.hpp"
#include "bmc/io.hpp"

using namespace bmc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("bmc_unit_" + name);
  fs::remove_all(p);
  return p;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_SUITE("harness") {
TEST_CASE("regression on an exact power law") {
  std::vector<RatePoint> pts;
  for (double n : {4.0, 16.0, 64.0, 256.0, 1024.0}) pts.push_back({n, 4 / std::sqrt(n)});
  auto fit = rate_regression(pts);
  CHECK(fit.slope == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::exp(fit.intercept) == doctest::Approx(4.0));
}

TEST_CASE("regression under multiplicative noise") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<RatePoint> pts;
  for (int i = 2; i <= 12; ++i) {
    double n = std::ldexp(1.0, i);
    pts.push_back({n, (1 + 0.01 * u(rng)) / n});
  }
  auto fit = rate_regression(pts);
  CHECK(std::fabs(fit.slope + 1) < 0.05);
  CHECK(fit.slope_lo <= fit.slope);
  CHECK(fit.slope_hi >= fit.slope);
}

TEST_CASE("regression preconditions") {
  std::vector<RatePoint> pts{{1, 1}, {2, 0.5}, {4, 0.25}};
  CHECK_THROWS_AS(rate_regression(pts), Error);
  pts.push_back({8, 0.0});
  try {
    rate_regression(pts);
    FAIL("zero error accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidArgument);
    CHECK(e.message().find("exclude") != std::string::npos);
  }
  CHECK_FALSE(fittable(pts));
}

TEST_CASE("counterexample threshold") {
  CHECK(counterexample_n_star(1.0, 2) == 10);
  CHECK(counterexample_n_star(1.0, 4) == 31);
  CHECK(counterexample_n_star(1.0, 8) == 108);
  for (std::size_t M : {2u, 4u, 8u}) {
    double n = double(counterexample_n_star(1.0, M));
    // n* is the first n at which the lower bound on the pi error reaches 1.
    CHECK(2.0 * std::pow(1 - double(M) / n, 1.0 + double(M)) >= 1.0);
    CHECK(2.0 * std::pow(1 - double(M) / (n - 1), 1.0 + double(M)) < 1.0);
  }
}

TEST_CASE("single sample counterexample error is deterministic") {
  for (std::size_t n : {2u, 5u, 17u}) {
    auto rep = counterexample_experiment(1.0, 1, {3, {}}, 16, n);
    CHECK(rep.pi_error.value == doctest::Approx(2.0 * (1 - 1.0 / double(n))).epsilon(1e-12));
    CHECK(rep.pi_error.standard_error == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  }
}

TEST_CASE("counterexample at the threshold") {
  auto rep = counterexample_experiment(1.0, 4, {5, {}}, 256);
  CHECK(rep.n == 31);
  CHECK(rep.pi_error.value + 3 * rep.pi_error.standard_error >= 1.0);
  CHECK(rep.eps_error.value <= 1.0);
  CHECK(rep.pi_bound_q >= 1.0);
}

TEST_CASE("config round trip and errors") {
  ExperimentConfig cfg = ExperimentConfig::parse_ini(
      "# comment\n[space]\np = 1.5\n; another\n[estimator]\nM = 8, 16,32\n[allocator]\nC_star = 2.5\n");
  CHECK(cfg.get_real("space", "p") == 1.5);
  CHECK(cfg.get_ints("estimator", "M") == std::vector<std::int64_t>{8, 16, 32});
  CHECK(cfg.is_set("allocator", "C_star"));
  CHECK_FALSE(cfg.is_set("allocator", "C_alpha"));
  std::string canon = cfg.canonical();
  CHECK(ExperimentConfig::parse_ini(canon).canonical() == canon);
  CHECK(ExperimentConfig::parse_json(cfg.to_json()).canonical() == canon);
  CHECK(ExperimentConfig::parse(cfg.to_json()).canonical() == canon);

  CHECK_THROWS_AS(ExperimentConfig::parse_ini("[space]\nbogus = 1\n"), Error);
  CHECK_THROWS_AS(ExperimentConfig::parse_ini("[nowhere]\n"), Error);
  CHECK_THROWS_AS(ExperimentConfig::parse_ini("[space]\np = 2\np = 3\n"), Error);
  CHECK_THROWS_AS(ExperimentConfig::parse_ini("[space]\np = abc\n"), Error);
  try {
    ExperimentConfig::parse_ini("[space]\n\nbogus = 1\n");
    FAIL("unknown key accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
    CHECK(e.message().find("line 3") != std::string::npos);
  }
  CHECK_FALSE(config_help().empty());
}

TEST_CASE("minimal run writes a single zero error") {
  auto cfg = ExperimentConfig::parse_ini("[model]\nkind = constant\nn = 3\n[estimator]\nM = 1\n");
  auto dir = scratch("minimal");
  auto summary = run_experiment(cfg, dir.string());
  CHECK(summary.pass);
  auto rows = lines(read_file((dir / "rates.csv").string()));
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].substr(0, 4) == "1,0,");
  CHECK(fs::exists(dir / "manifest.json"));
  CHECK(fs::exists(dir / "summary.json"));
  CHECK(ExperimentConfig::load((dir / "config.ini").string()).canonical() == cfg.canonical());
}

TEST_CASE("same config and seed give byte-identical tables") {
  auto cfg = ExperimentConfig::parse_ini(
      "[experiment]\nruns = 8\nseed = 11\n[model]\nkind = gaussian\nn = 3\n[estimator]\nM = 4, 8, 16, 32\n");
  auto a = scratch("det_a"), b = scratch("det_b");
  run_experiment(cfg, a.string());
  run_experiment(cfg, b.string());
  CHECK(read_file((a / "rates.csv").string()) == read_file((b / "rates.csv").string()));
  cfg.set("experiment", "seed", "12");
  auto c = scratch("det_c");
  run_experiment(cfg, c.string());
  CHECK(read_file((a / "rates.csv").string()) != read_file((c / "rates.csv").string()));
}

TEST_CASE("failed runs leave a failed manifest") {
  auto cfg = ExperimentConfig::parse_ini("[experiment]\nkind = mlmc-run\n[model]\nkind = gaussian\n");
  auto dir = scratch("failed");
  CHECK_THROWS_AS(run_experiment(cfg, dir.string()), Error);
  auto manifest = read_file((dir / "manifest.json").string());
  CHECK(manifest.find("\"failed\"") != std::string::npos);
  CHECK(manifest.find("failed_stage") != std::string::npos);
}

TEST_CASE("small multilevel run produces the epsilon table") {
  auto cfg = ExperimentConfig::parse_ini(
      "[experiment]\nkind = mlmc-run\nruns = 2\n[model]\nkind = elliptic1d_loggauss\n"
      "[estimator]\nnorm = hilbert_k2_exact\nreference_samples = 2000\n[allocator]\nepsilon = 0.5, 0.25\n"
      "pilot_samples = 64\n");
  auto dir = scratch("mlmc");
  run_experiment(cfg, dir.string());
  auto rows = lines(read_file((dir / "mlmc.csv").string()));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].rfind("epsilon,L,achieved_error", 0) == 0);
  CHECK(fs::exists(dir / "plan_0.json"));
}
}
