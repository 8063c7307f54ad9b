#include "bmc/allocator.hpp"

#include <cmath>

#include "bmc/error.hpp"

namespace bmc {

namespace {

using real = long double;

constexpr double kRegimeTol = 1e-12;

Regime regime_of(double beta, double p_prime, double gamma) {
  double d = beta * p_prime - gamma;
  if (std::fabs(d) <= kRegimeTol * std::max(1.0, gamma)) return Regime::Critical;
  return d > 0 ? Regime::BetaDominant : Regime::GammaDominant;
}

}  // namespace

const char* to_string(Regime r) {
  switch (r) {
    case Regime::BetaDominant: return "beta_dominant";
    case Regime::Critical: return "critical";
    case Regime::GammaDominant: return "gamma_dominant";
  }
  return "?";
}

int choose_level(double epsilon, double alpha, double C_alpha, const std::vector<double>& N) {
  require(epsilon > 0.0 && epsilon <= 0.5, ErrorKind::InvalidArgument, "epsilon must lie in (0, 1/2]");
  require(alpha > 0.0 && C_alpha > 0.0, ErrorKind::InvalidArgument, "alpha and C_alpha must be positive");
  for (std::size_t i = 1; i < N.size(); ++i)
    require(N[i] > N[i - 1], ErrorKind::InvalidArgument, "level sizes must increase");
  const real target = std::min<real>(1.0L / real(C_alpha), 1.0L) * real(epsilon) / 2.0L;
  for (std::size_t l = 0; l < N.size(); ++l)
    if (std::pow(real(N[l]), -real(alpha)) < target) return int(l + 1);
  real need = std::pow(1.0L / target, 1.0L / real(alpha));
  fail(ErrorKind::InvalidArgument, "level sequence exhausted: need N_L > " + std::to_string(double(need)) +
                                       " but the largest available N is " +
                                       (N.empty() ? std::string("none") : std::to_string(N.back())));
}

MlmcPlan allocate(const AllocatorInputs& in) {
  require(in.p > 1.0 && in.p <= 2.0, ErrorKind::InvalidArgument, "allocation needs type p in (1, 2]");
  require(in.beta > 0.0 && in.gamma > 0.0 && in.C_star > 0.0, ErrorKind::InvalidArgument,
          "beta, gamma and C_star must be positive");
  MlmcPlan plan;
  plan.in = in;
  const real pp = real(in.p) / (real(in.p) - 1.0L);
  plan.p_prime = double(pp);
  plan.L = choose_level(in.epsilon, in.alpha, in.C_alpha, in.N);
  plan.regime = regime_of(in.beta, plan.p_prime, in.gamma);

  const real e_s = (real(in.gamma) - real(in.beta) * pp) / (pp + 1.0L);
  real S = 0.0L;
  for (int l = 1; l <= plan.L; ++l) S += std::pow(real(in.N[l - 1]), e_s);
  plan.S_L = double(S);
  const real NL = in.N[plan.L - 1];
  const real pre = std::pow(real(in.C_star), pp) * std::pow(NL, real(in.alpha) * pp) * std::pow(S, pp);
  const real e_m = -(real(in.beta) + real(in.gamma)) * pp / (pp + 1.0L);
  for (int l = 1; l <= plan.L; ++l) {
    real m = std::ceil(pre * std::pow(real(in.N[l - 1]), e_m));
    m = std::max<real>(m, 1.0L);
    require(m <= real(in.max_samples), ErrorKind::InvalidArgument,
            "sample cap binds on level " + std::to_string(l) + ": need M_l = " + std::to_string(double(m)) +
                " > cap " + std::to_string(in.max_samples));
    plan.M.push_back(std::size_t(m));
  }
  return plan;
}

CostPrediction predicted_cost(const MlmcPlan& plan) {
  const auto& in = plan.in;
  CostPrediction c;
  real cost = 0.0L;
  for (int l = 1; l <= plan.L; ++l) cost += real(plan.M[l - 1]) * std::pow(real(in.N[l - 1]), real(in.gamma));
  c.cost = double(cost);
  c.regime = plan.regime;
  const double pp = plan.p_prime, ga = in.gamma / in.alpha;
  switch (plan.regime) {
    case Regime::BetaDominant:
      c.exponent = std::max(ga, pp);
      break;
    case Regime::Critical:
      c.exponent = std::max(ga, pp);
      c.log_factor = pp >= ga;
      break;
    case Regime::GammaDominant:
      c.exponent = std::max(ga, pp + (in.gamma - in.beta * pp) / in.alpha);
      break;
  }
  c.single_level_exponent = ga + pp;
  return c;
}

double error_budget(const MlmcPlan& plan) {
  const auto& in = plan.in;
  real e = real(in.C_alpha) * std::pow(real(in.N[plan.L - 1]), -real(in.alpha));
  for (int l = 1; l <= plan.L; ++l)
    e += real(in.C_star) * std::pow(real(plan.M[l - 1]), -1.0L / real(plan.p_prime)) *
         std::pow(real(in.N[l - 1]), -real(in.beta));
  return double(e);
}

SingleLevelPlan single_level_plan(const AllocatorInputs& in, double C_sl) {
  SingleLevelPlan s;
  s.L = choose_level(in.epsilon, in.alpha, in.C_alpha, in.N);
  const real pp = real(in.p) / (real(in.p) - 1.0L);
  real m = std::ceil(std::pow(2.0L * real(C_sl) / real(in.epsilon), pp));
  s.M = std::size_t(std::max<real>(m, 1.0L));
  s.cost = double(real(s.M) * std::pow(real(in.N[s.L - 1]), real(in.gamma)));
  return s;
}

Calibration calibrate_c_star(const LevelHierarchy& model, int k, double q, double beta, double C_ML,
                             const std::vector<int>& levels, std::size_t samples, const SeedSpec& seed) {
  require(!levels.empty() && samples >= 2, ErrorKind::InvalidArgument, "calibration needs levels and >= 2 samples");
  const double r = double(k) * q;
  Calibration cal;
  for (int l : levels) {
    double diff = 0.0, stab = 0.0;
    for (std::size_t j = 0; j < samples; ++j) {
      CoupledSample s = model.sample(l, seed.child(std::size_t(l)).child(j));
      diff += std::pow(norm(s.fine.combine(1.0, s.coarse, -1.0)), r);
      stab += std::pow(norm(s.fine), r);
    }
    diff = std::pow(diff / double(samples), 1.0 / r);
    stab = std::pow(stab / double(samples), 1.0 / r);
    cal.level_diff_norms.push_back(diff);
    cal.C_beta = std::max(cal.C_beta, diff * std::pow(model.size(l), beta));
    cal.C_stab = std::max(cal.C_stab, stab);
  }
  double bracket = 0.0;
  for (int i = 0; i < k; ++i) {
    double binom = 1.0;
    for (int t = 1; t <= i + 1; ++t) binom = binom * double(k - t + 1) / double(t);
    bracket += (binom * std::pow(cal.C_beta, i) + std::pow(cal.C_stab, i)) * std::pow(cal.C_stab, k - i - 1);
  }
  cal.bracket = bracket;
  cal.C_star = C_ML * cal.C_beta * bracket;
  return cal;
}

}  // namespace bmc
