#pragma once

// Experiment drivers: convergence-rate sweeps, the multilevel run over an
// accuracy grid, the uniform-basis counterexample, and log-log regression.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "bmc/allocator.hpp"
#include "bmc/config.hpp"
#include "bmc/estimators.hpp"

namespace bmc {

struct RatePoint {
  double n = 0.0;  // M, N_l or epsilon
  double err = 0.0;
  double se = 0.0;
  double work_units = 0.0;
  std::string seed;
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double slope_lo = 0.0, slope_hi = 0.0;  // 95% bootstrap interval over points
};

/// At least 4 points, all with err > 0 and n > 0.
bool fittable(const std::vector<RatePoint>& points);

/// OLS of log err on log n. Needs >= 4 points with err > 0.
RateFit rate_regression(const std::vector<RatePoint>& points, std::size_t resamples = 2000,
                        std::uint64_t seed = 0x3c6ef372fe94f82bULL);

struct RateResult {
  std::vector<RatePoint> points;
  RateFit fit;
};

/// Standard MC error of the k-th moment against `ref` for every M, as the L_q
/// norm over R runs. Run r of size M uses seed.child(M).child(r).
RateResult mc_rate_experiment(const Sampler& sampler, const ReferenceMoment& ref, int k,
                              const std::vector<std::size_t>& Ms, std::size_t R, double q, NormKind norm,
                              const SeedSpec& seed, const AscentOptions& opts = {});

/// Strong error (E ||X_l - X_ref||^q)^{1/q} against N_l, all levels driven by
/// the same randomness; X_l is embedded into the reference level.
RateResult strong_rate_experiment(const LevelHierarchy& model, const std::vector<int>& levels, int ref_level,
                                  std::size_t R, double q, const SeedSpec& seed);

/// n* = ceil(M / (1 - 2^{-q/(q+M)})).
std::size_t counterexample_n_star(double q, std::size_t M);

struct CounterexampleReport {
  double q = 1.0;
  std::size_t M = 0, n = 0, R = 0;
  LqError pi_error, eps_error;
  /// 2^q (1 - M/n)^{q+M}, the lower bound on E err_pi^q.
  double pi_bound_q = 0.0;
  std::string seed;
};

/// R standard-MC second-moment estimates of e_I in l_2^n with errors in the
/// nuclear (pi) and spectral (eps) norm. n = 0 selects n*(q, M).
CounterexampleReport counterexample_experiment(double q, std::size_t M, const SeedSpec& seed, std::size_t R = 256,
                                               std::size_t n = 0);

struct MlmcRunRow {
  double epsilon = 0.0;
  MlmcPlan plan;
  LqError achieved;
  double work_units = 0.0;  // mean measured cost per run
  double predicted_cost = 0.0;
  double single_level_cost = 0.0;
  std::string seed;
};

struct MlmcRunResult {
  Calibration calibration;
  double C_alpha = 0.0, C_star = 0.0;
  std::vector<MlmcRunRow> rows;
  RateFit cost_fit;  // log cost vs log epsilon
};

struct MlmcRunOptions {
  int k = 2;
  double q = 2.0;
  std::size_t runs = 8;
  NormKind norm = NormKind::HilbertK2Exact;
  std::vector<double> epsilons;
  AllocatorInputs alloc;  // alpha, beta, gamma, p, max_samples; C_* filled below when <= 0
  double C_ML = 1.0;
  std::vector<int> pilot_levels = {2, 3};
  std::size_t pilot_samples = 4096;
  int max_level = 16;
  int reference_extra = 2;
  std::size_t reference_samples = 20000;
};

/// For every epsilon: allocate, run R multilevel estimates and measure their
/// L_q error against a level L + reference_extra fine average. Unset
/// constants (<= 0) are calibrated from pilot samples.
MlmcRunResult mlmc_run_experiment(const LevelHierarchy& model, MlmcRunOptions opts, const SeedSpec& seed);

// ---- configuration-driven runs ---------------------------------------------

std::unique_ptr<LevelHierarchy> make_model(const ExperimentConfig& cfg);
/// Sequence-space samplers (gaussian, signed_basis, uniform_basis, constant).
Sampler make_sampler(const ExperimentConfig& cfg);

struct RunSummary {
  std::string kind;
  std::vector<std::string> files;
  bool pass = true;  // property-suite verdict; true otherwise
};

/// Executes the configured experiment and writes CSV tables, summary.json
/// and manifest.json into out_dir. A failure rewrites the manifest with
/// status "failed" and the stage name before rethrowing.
RunSummary run_experiment(const ExperimentConfig& cfg, const std::string& out_dir);

inline constexpr int kSummarySchemaVersion = 1;

}  // namespace bmc
