#pragma once

// Seeded random streams, Gaussian random fields, the uniform-basis variable and
// empirical checks of the probabilistic inequalities behind the MC rates.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "bmc/spaces.hpp"

namespace bmc {

/// root seed plus a path such as (experiment, level, sample). Identical specs
/// reproduce identical draws; distinct paths give independent streams.
struct SeedSpec {
  std::uint64_t root = 0;
  std::vector<std::uint64_t> path;

  SeedSpec child(std::uint64_t i) const;
  /// 64-bit stream key derived by chained splitmix64 mixing of root and path.
  std::uint64_t key() const;
  std::string to_string() const;
};

/// Counter-based generator: draw i is splitmix64(key + i * golden). Seeding is
/// free, so one stream per sample stays cheap.
class CounterEngine {
 public:
  using result_type = std::uint64_t;
  explicit CounterEngine(std::uint64_t key = 0) : key_(key) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type(0); }
  result_type operator()() {
    std::uint64_t x = key_ + (++ctr_) * 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

 private:
  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
};

class Stream {
 public:
  explicit Stream(const SeedSpec& seed) : eng_(seed.key()) {}
  explicit Stream(std::uint64_t key) : eng_(key) {}

  double normal() { return normal_(eng_); }
  double uniform() { return uniform_(eng_); }
  double rademacher() { return (eng_() >> 63) ? 1.0 : -1.0; }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(eng_); }
  CounterEngine& engine() { return eng_; }

 private:
  CounterEngine eng_;
  std::normal_distribution<double> normal_;
  std::uniform_real_distribution<double> uniform_;
};

enum class FamilyKind { Rademacher, Gaussian };

std::vector<double> draw_family(FamilyKind kind, std::size_t M, const SeedSpec& seed);

/// g(x) = sum_m sigma_m xi_m cos(m pi x / b), xi_m i.i.d. standard normal.
struct KlFieldConfig {
  std::vector<double> sigma;        // sigma_1 .. sigma_{n_modes}
  double length = 1.0;              // b
  std::vector<double> breakpoints;  // partition of [0,b]; empty means {0, b}
  int oversample = 16;

  void validate() const;
};

struct KlFieldSample {
  std::vector<double> xi;
  std::vector<double> g_nodes;    // g at the grid nodes
  std::vector<double> g_prime;    // g' at element midpoints
  std::vector<double> a_mid;      // exp(g) at element midpoints
  // extrema per partition interval and overall
  std::vector<double> a_lo_part, a_hi_part, a_prime_hi_part;
  double a_lo = 1.0, a_hi = 1.0, a_prime_hi = 0.0;
};

double kl_g(const KlFieldConfig& cfg, const std::vector<double>& xi, double x);
double kl_g_prime(const KlFieldConfig& cfg, const std::vector<double>& xi, double x);
/// Draws the mode coefficients xi for one realization.
std::vector<double> kl_draw_modes(const KlFieldConfig& cfg, Stream& rng);
/// Evaluates a realization with fixed modes on a grid whose nodes contain the breakpoints.
KlFieldSample kl_field_eval(const KlFieldConfig& cfg, const std::vector<double>& grid, std::vector<double> xi);
KlFieldSample kl_field_sample(const KlFieldConfig& cfg, const std::vector<double>& grid, const SeedSpec& seed);

/// e_I in l_2^n with I uniform on {0..n-1}.
BanachVector uniform_basis_sample(std::size_t n, const SeedSpec& seed);
BanachVector uniform_basis_sample(const SpacePtr& l2n, Stream& rng);

// ---- probabilistic property suite ----------------------------------------

struct PropertyCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool pass = false;
  bool exhaustive = false;
  std::string detail;
};

struct PropertyReport {
  std::vector<PropertyCheck> checks;
  std::uint64_t seed = 0;
  bool all_pass() const;
};

/// Haagerup's optimal Khintchine constants: A_q ||a||_2 <= ||sum r_j a_j||_{L_q} <= B_q ||a||_2.
double khintchine_lower(double q);
double khintchine_upper(double q);

/// Exact ||sum_j r_j a_j||_{L_q} by enumerating all 2^M sign patterns (M <= 24).
double rademacher_lq_exact(const std::vector<double>& a, double q);

PropertyReport probabilistic_property_suite(std::size_t trials, const SeedSpec& seed);

}  // namespace bmc
