#pragma once

// Level selection and per-level sample counts for the multilevel estimator
// under bias rate alpha, coupling rate beta and cost rate gamma.

#include <cstddef>
#include <string>
#include <vector>

#include "bmc/models.hpp"

namespace bmc {

enum class Regime { BetaDominant, Critical, GammaDominant };
const char* to_string(Regime r);

struct AllocatorInputs {
  double alpha = 1.0, beta = 1.0, gamma = 1.0;
  double p = 2.0;  // type of the space, in (1, 2]
  double epsilon = 0.25;
  double C_alpha = 1.0;
  double C_star = 1.0;
  std::vector<double> N;  // N_1, N_2, ... (increasing)
  /// Hard cap on any M_l; exceeding it is an error rather than a silent truncation.
  double max_samples = 1e9;
};

struct MlmcPlan {
  AllocatorInputs in;
  double p_prime = 2.0;
  int L = 0;
  double S_L = 0.0;
  std::vector<std::size_t> M;
  Regime regime = Regime::BetaDominant;
};

/// Smallest L with N_L^{-alpha} < min(1/C_alpha, 1) * epsilon / 2.
int choose_level(double epsilon, double alpha, double C_alpha, const std::vector<double>& N);

MlmcPlan allocate(const AllocatorInputs& in);

struct CostPrediction {
  double cost = 0.0;  // sum_l M_l N_l^gamma
  Regime regime = Regime::BetaDominant;
  double exponent = 0.0;        // cost ~ epsilon^{-exponent}
  bool log_factor = false;      // extra |log epsilon|^{p'+1}
  double single_level_exponent = 0.0;
};

CostPrediction predicted_cost(const MlmcPlan& plan);

/// C_alpha N_L^{-alpha} + C_star sum_l M_l^{-1/p'} N_l^{-beta}.
double error_budget(const MlmcPlan& plan);

/// Single-level comparison: L as for MLMC, M = ceil((2 C_SL / epsilon)^{p'}), cost M N_L^gamma.
struct SingleLevelPlan {
  int L = 0;
  std::size_t M = 0;
  double cost = 0.0;
};
SingleLevelPlan single_level_plan(const AllocatorInputs& in, double C_sl);

struct Calibration {
  double C_beta = 0.0;
  double C_stab = 0.0;
  double bracket = 0.0;  // sum_{i<k} (binom(k,i+1) C_beta^i + C_stab^i) C_stab^{k-i-1}
  double C_star = 0.0;
  std::vector<double> level_diff_norms;  // ||X_l - X_{l-1}||_{L_kq} per pilot level
};

/// Pilot estimate of C_star = C_ML * C_beta * bracket from `samples` coupled
/// samples on each of `levels`.
Calibration calibrate_c_star(const LevelHierarchy& model, int k, double q, double beta, double C_ML,
                             const std::vector<int>& levels, std::size_t samples, const SeedSpec& seed);

}  // namespace bmc
