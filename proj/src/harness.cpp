#include "bmc/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <json.hpp>
#include <numeric>
#include <random>

#include "bmc/error.hpp"
#include "bmc/io.hpp"
#include "bmc/kernels.hpp"

#ifndef BMC_VERSION
#define BMC_VERSION "0.0.0"
#endif

namespace bmc {

namespace {

struct Ols {
  double slope, intercept, r2;
};

Ols ols(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = double(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  Ols o;
  o.slope = sxx > 0 ? sxy / sxx : 0.0;
  o.intercept = my - o.slope * mx;
  o.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return o;
}

}  // namespace

bool fittable(const std::vector<RatePoint>& points) {
  return points.size() >= 4 &&
         std::all_of(points.begin(), points.end(), [](const RatePoint& p) { return p.err > 0.0 && p.n > 0.0; });
}

RateFit rate_regression(const std::vector<RatePoint>& points, std::size_t resamples, std::uint64_t seed) {
  require(points.size() >= 4, ErrorKind::InvalidArgument,
          "rate regression needs at least 4 points, got " + std::to_string(points.size()));
  std::vector<double> x, y;
  for (const auto& p : points) {
    require(p.n > 0.0, ErrorKind::InvalidArgument, "rate regression needs n > 0");
    require(p.err > 0.0, ErrorKind::InvalidArgument,
            "zero error at n = " + format_double(p.n) +
                ": the estimate is exact there; exclude exact cases before fitting a rate");
    x.push_back(std::log(p.n));
    y.push_back(std::log(p.err));
  }
  Ols o = ols(x, y);
  RateFit fit{o.slope, o.intercept, o.r2, o.slope, o.slope};
  if (resamples >= 2) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, x.size() - 1);
    std::vector<double> slopes;
    std::vector<double> bx(x.size()), by(y.size());
    for (std::size_t b = 0; b < resamples; ++b) {
      for (std::size_t i = 0; i < x.size(); ++i) {
        std::size_t j = pick(rng);
        bx[i] = x[j];
        by[i] = y[j];
      }
      if (std::all_of(bx.begin(), bx.end(), [&](double v) { return v == bx[0]; })) continue;
      slopes.push_back(ols(bx, by).slope);
    }
    if (!slopes.empty()) {
      std::sort(slopes.begin(), slopes.end());
      fit.slope_lo = slopes[std::size_t(0.025 * double(slopes.size() - 1))];
      fit.slope_hi = slopes[std::size_t(0.975 * double(slopes.size() - 1))];
    }
  }
  return fit;
}

RateResult mc_rate_experiment(const Sampler& sampler, const ReferenceMoment& ref, int k,
                              const std::vector<std::size_t>& Ms, std::size_t R, double q, NormKind norm,
                              const SeedSpec& seed, const AscentOptions& opts) {
  require(R >= 1, ErrorKind::InvalidArgument, "need at least one run");
  RateResult out;
  for (std::size_t M : Ms) {
    std::vector<double> errs;
    double work = 0.0;
    SeedSpec sm = seed.child(M);
    for (std::size_t r = 0; r < R; ++r) {
      MomentEstimate est = mc_kth_moment(sampler, k, M, sm.child(r));
      errs.push_back(error_in_norm(est, ref, norm, opts));
      work += est.work_units;
    }
    LqError e = lq_error(errs, q);
    out.points.push_back({double(M), e.value, e.standard_error, work / double(R), sm.to_string()});
  }
  if (fittable(out.points)) out.fit = rate_regression(out.points);
  return out;
}

RateResult strong_rate_experiment(const LevelHierarchy& model, const std::vector<int>& levels, int ref_level,
                                  std::size_t R, double q, const SeedSpec& seed) {
  require(R >= 1, ErrorKind::InvalidArgument, "need at least one run");
  for (int l : levels) require(l >= 1 && l < ref_level, ErrorKind::InvalidArgument, "sweep levels must lie below the reference level");
  std::vector<int> all = levels;
  all.push_back(ref_level);
  std::vector<std::vector<double>> errs(levels.size());
  double work = 0.0;
  for (std::size_t r = 0; r < R; ++r) {
    double w = 0.0;
    auto vs = model.solve_levels(all, seed.child(r), &w);
    work += w;
    BanachVector ref = model.embed(vs.back(), ref_level);
    for (std::size_t i = 0; i < levels.size(); ++i) {
      BanachVector x = model.embed(vs[i], ref_level);
      errs[i].push_back(norm(x.combine(1.0, ref, -1.0)));
    }
  }
  RateResult out;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    LqError e = lq_error(errs[i], q);
    out.points.push_back({model.size(levels[i]), e.value, e.standard_error, work / double(R), seed.to_string()});
  }
  if (fittable(out.points)) out.fit = rate_regression(out.points);
  return out;
}

std::size_t counterexample_n_star(double q, std::size_t M) {
  require(q >= 1.0 && M >= 1, ErrorKind::InvalidArgument, "counterexample needs q >= 1 and M >= 1");
  long double denom = 1.0L - std::pow(2.0L, -(long double)q / ((long double)q + (long double)M));
  return std::size_t(std::ceil((long double)M / denom));
}

CounterexampleReport counterexample_experiment(double q, std::size_t M, const SeedSpec& seed, std::size_t R,
                                               std::size_t n) {
  CounterexampleReport rep;
  rep.q = q;
  rep.M = M;
  rep.R = R;
  rep.n = n == 0 ? counterexample_n_star(q, M) : n;
  rep.seed = seed.to_string();
  rep.pi_bound_q = std::pow(2.0, q) * std::pow(std::max(0.0, 1.0 - double(M) / double(rep.n)), q + double(M));

  SpacePtr sp = make_sequence_space(rep.n, 2.0);
  ReferenceMoment truth;
  truth.rep = SymmetricTensorRep(2, sp);
  std::vector<double> e(rep.n, 0.0);
  for (std::size_t i = 0; i < rep.n; ++i) {
    e[i] = 1.0;
    truth.rep.add(1.0 / double(rep.n), e);
    e[i] = 0.0;
  }
  Sampler s = uniform_basis_sampler(rep.n);
  std::vector<double> pi, eps;
  for (std::size_t r = 0; r < R; ++r) {
    MomentEstimate est = mc_kth_moment(s, 2, M, seed.child(r));
    HilbertOracles o = hilbert_k2_oracles(difference(est.levels[0], truth.rep));
    pi.push_back(o.nuclear);
    eps.push_back(o.spectral);
  }
  rep.pi_error = lq_error(pi, q);
  rep.eps_error = lq_error(eps, q);
  return rep;
}

MlmcRunResult mlmc_run_experiment(const LevelHierarchy& model, MlmcRunOptions opts, const SeedSpec& seed) {
  require(!opts.epsilons.empty(), ErrorKind::InvalidArgument, "MLMC run needs an epsilon grid");
  require(opts.runs >= 1, ErrorKind::InvalidArgument, "need at least one run");
  MlmcRunResult out;
  out.calibration = calibrate_c_star(model, opts.k, opts.q, opts.alloc.beta, opts.C_ML, opts.pilot_levels,
                                     opts.pilot_samples, seed.child(0));
  const Calibration& cal = out.calibration;
  AllocatorInputs in = opts.alloc;
  if (in.C_star <= 0.0) in.C_star = cal.C_star;
  if (in.C_alpha <= 0.0) in.C_alpha = double(opts.k) * std::pow(cal.C_stab, opts.k - 1) * cal.C_beta;
  out.C_alpha = in.C_alpha;
  out.C_star = in.C_star;
  in.N.clear();
  for (int l = 1; l <= opts.max_level; ++l) in.N.push_back(model.size(l));

  std::vector<RatePoint> cost_points;
  for (std::size_t ie = 0; ie < opts.epsilons.size(); ++ie) {
    MlmcRunRow row;
    row.epsilon = opts.epsilons[ie];
    in.epsilon = row.epsilon;
    row.plan = allocate(in);
    const int L = row.plan.L;
    ReferenceMoment ref = reference_fine_average(model, L + opts.reference_extra, opts.k, opts.reference_samples,
                                                 seed.child(1).child(ie));
    SeedSpec se = seed.child(2).child(ie);
    row.seed = se.to_string();
    std::vector<double> errs;
    double work = 0.0;
    for (std::size_t r = 0; r < opts.runs; ++r) {
      MomentEstimate est = mlmc_estimate(model, opts.k, row.plan.M, se.child(r), true);
      errs.push_back(error_in_norm(est, ref, opts.norm));
      work += est.work_units;
    }
    row.achieved = lq_error(errs, opts.q);
    row.work_units = work / double(opts.runs);
    row.predicted_cost = predicted_cost(row.plan).cost;

    // Single-level comparison at the same L with the MC constant C_ML C_stab^k.
    double w_L = 0.0;
    model.solve_levels({L}, seed.child(3), &w_L);
    SingleLevelPlan sl = single_level_plan(in, opts.C_ML * std::pow(cal.C_stab, opts.k));
    row.single_level_cost = double(sl.M) * w_L;
    cost_points.push_back({row.epsilon, row.work_units, 0.0, row.work_units, row.seed});
    out.rows.push_back(std::move(row));
  }
  if (fittable(cost_points)) out.cost_fit = rate_regression(cost_points);
  return out;
}

// ---- configuration-driven runs ---------------------------------------------

std::unique_ptr<LevelHierarchy> make_model(const ExperimentConfig& cfg) {
  const std::string kind = cfg.get_str("model", "kind");
  const double p = cfg.get_real("space", "p");
  if (kind == "elliptic1d_loggauss") {
    LogGaussConfig c;
    c.field.sigma = cfg.get_reals("model", "kl_sigma");
    c.field.length = cfg.get_real("model", "kl_length");
    c.field.breakpoints = cfg.get_reals("model", "kl_breakpoints");
    c.p = p;
    c.base_elements = std::size_t(cfg.get_int("model", "base_elements"));
    return std::make_unique<Elliptic1dLogGauss>(std::move(c));
  }
  if (kind == "elliptic1d_forcing" || kind == "elliptic2d_forcing") {
    ForcingLaw law;
    law.mean = cfg.get_real("model", "forcing_mean");
    law.amplitudes = cfg.get_reals("model", "forcing_amplitudes");
    const std::string eta = cfg.get_str("model", "forcing_eta");
    require(eta == "gaussian" || eta == "student_t", ErrorKind::Config, "forcing_eta must be gaussian or student_t");
    law.eta = eta == "gaussian" ? ForcingLaw::Eta::Gaussian : ForcingLaw::Eta::StudentT;
    law.dof = cfg.get_real("model", "forcing_dof");
    return std::make_unique<EllipticForcing>(law, kind == "elliptic1d_forcing" ? 1 : 2, p,
                                             std::size_t(cfg.get_int("model", "base_elements")));
  }
  if (kind == "sde") {
    SdeHierarchyConfig c;
    c.spec.preset = cfg.get_str("model", "sde_preset");
    c.spec.params = cfg.get_reals("model", "sde_params");
    c.spec.x0 = cfg.get_reals("model", "sde_x0");
    c.spec.T = cfg.get_real("model", "sde_T");
    c.delta = cfg.get_real("space", "delta");
    c.n1 = std::size_t(cfg.get_int("model", "sde_n1"));
    c.factor = std::size_t(cfg.get_int("model", "sde_factor"));
    c.output_level = int(cfg.get_int("model", "sde_output_level"));
    return std::make_unique<SdeHierarchy>(std::move(c));
  }
  return nullptr;
}

Sampler make_sampler(const ExperimentConfig& cfg) {
  const std::string kind = cfg.get_str("model", "kind");
  const std::size_t n = std::size_t(cfg.get_int("model", "n"));
  const double p = cfg.get_real("space", "p");
  if (kind == "gaussian") return gaussian_sampler(n, p);
  if (kind == "signed_basis") return signed_basis_sampler(n);
  if (kind == "uniform_basis") return uniform_basis_sampler(n);
  if (kind == "constant") {
    auto c = cfg.get_reals("model", "constant");
    require(!c.empty(), ErrorKind::Config, "constant sampler needs coefficients");
    return constant_sampler(BanachVector(make_sequence_space(c.size(), p), c));
  }
  fail(ErrorKind::Config, "unknown model kind '" + kind + "'");
}

namespace {

using nlohmann::ordered_json;

double error_q(const ExperimentConfig& cfg) {
  if (cfg.is_set("space", "q")) return cfg.get_real("space", "q");
  return std::max(2.0, cfg.get_real("space", "p"));
}

bool is_sequence_model(const std::string& kind) {
  return kind == "gaussian" || kind == "signed_basis" || kind == "uniform_basis" || kind == "constant";
}

// Exact k-th moment of the sequence-space samplers.
ReferenceMoment analytic_reference(const ExperimentConfig& cfg, int k) {
  const std::string kind = cfg.get_str("model", "kind");
  const std::size_t n = std::size_t(cfg.get_int("model", "n"));
  const double p = kind == "signed_basis" ? 1.0 : kind == "uniform_basis" ? 2.0 : cfg.get_real("space", "p");
  ReferenceMoment ref;
  ref.provenance = Provenance::Analytic;
  if (kind == "constant") {
    auto c = cfg.get_reals("model", "constant");
    ref.rep = SymmetricTensorRep(k, make_sequence_space(c.size(), p));
    ref.rep.add(1.0, c);
    ref.note = "x^k of the constant";
    return ref;
  }
  SpacePtr sp = make_sequence_space(n, p);
  ref.rep = SymmetricTensorRep(k, sp);
  const bool odd = k % 2 == 1;
  auto diag = [&](double w) {
    std::vector<double> e(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      e[i] = 1.0;
      ref.rep.add(w, e);
      e[i] = 0.0;
    }
  };
  if (kind == "uniform_basis") {
    diag(1.0 / double(n));
    ref.note = "(1/n) sum_i e_i^k";
  } else if (kind == "signed_basis") {
    if (!odd) diag(1.0 / double(n));
    ref.note = odd ? "zero (symmetric law)" : "(1/n) sum_i e_i^k";
  } else if (kind == "gaussian") {
    require(k <= 3, ErrorKind::Config, "analytic Gaussian moments are provided for k <= 3");
    if (k == 2) diag(1.0);
    ref.note = odd ? "zero (symmetric law)" : "identity";
  }
  return ref;
}

std::string rate_csv(const RateResult& r, const std::string& n_name, const std::string& norm) {
  std::string out = n_name + ",error,se,work_units,norm_kind,seed\n";
  for (const auto& p : r.points)
    out += format_double(p.n) + "," + format_double(p.err) + "," + format_double(p.se) + "," +
           format_double(p.work_units) + "," + norm + "," + p.seed + "\n";
  return out;
}

ordered_json fit_json(const RateFit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2}, {"slope_ci", {f.slope_lo, f.slope_hi}}};
}

AllocatorInputs allocator_inputs(const ExperimentConfig& cfg) {
  AllocatorInputs in;
  in.alpha = cfg.get_real("allocator", "alpha");
  in.beta = cfg.get_real("allocator", "beta");
  in.gamma = cfg.get_real("allocator", "gamma");
  in.p = cfg.get_real("space", "p");
  in.C_alpha = cfg.is_set("allocator", "C_alpha") ? cfg.get_real("allocator", "C_alpha") : 0.0;
  in.C_star = cfg.is_set("allocator", "C_star") ? cfg.get_real("allocator", "C_star") : 0.0;
  in.max_samples = cfg.get_real("allocator", "max_samples");
  return in;
}

std::vector<std::size_t> sizes(const std::vector<std::int64_t>& v) {
  std::vector<std::size_t> out;
  for (auto x : v) {
    require(x >= 1, ErrorKind::Config, "sample sizes must be positive");
    out.push_back(std::size_t(x));
  }
  return out;
}

struct Runner {
  const ExperimentConfig& cfg;
  std::filesystem::path dir;
  SeedSpec seed;
  RunSummary summary;
  ordered_json body = ordered_json::object();
  double work_units = 0.0;
  std::string stage = "setup";

  void emit(const std::string& name, const std::string& text) {
    write_file((dir / name).string(), text);
    summary.files.push_back(name);
  }

  void mc_rate() {
    const int k = int(cfg.get_int("space", "k"));
    const double q = error_q(cfg);
    const std::size_t R = std::size_t(cfg.get_int("experiment", "runs"));
    const std::string measure = cfg.get_str("experiment", "measure");
    const std::string kind = cfg.get_str("model", "kind");
    RateResult res;
    std::string n_name = "M", norm_name;
    if (measure == "strong") {
      stage = "model";
      auto model = make_model(cfg);
      require(model != nullptr, ErrorKind::Config, "strong sweeps need a level model");
      std::vector<int> levels;
      for (auto l : cfg.get_ints("estimator", "levels")) levels.push_back(int(l));
      stage = "strong sweep";
      res = strong_rate_experiment(*model, levels, int(cfg.get_int("estimator", "reference_level")), R, q, seed);
      n_name = "N";
      norm_name = "strong";
    } else {
      require(measure == "moment", ErrorKind::Config, "measure must be moment or strong");
      NormKind nk = norm_kind_from_string(cfg.get_str("estimator", "norm"));
      norm_name = to_string(nk);
      AscentOptions opts;
      opts.restarts = int(cfg.get_int("estimator", "restarts"));
      Sampler sampler;
      ReferenceMoment ref;
      std::unique_ptr<LevelHierarchy> model;
      stage = "reference";
      if (is_sequence_model(kind)) {
        sampler = make_sampler(cfg);
        ref = analytic_reference(cfg, k);
      } else {
        model = make_model(cfg);
        require(model != nullptr, ErrorKind::Config, "unknown model kind '" + kind + "'");
        const int level = int(cfg.get_int("estimator", "level"));
        const LevelHierarchy* m = model.get();
        sampler = [m, level](const SeedSpec& s) { return m->solve_levels({level}, s)[0]; };
        ref = reference_fine_average(*model, level, k, std::size_t(cfg.get_int("estimator", "reference_samples")),
                                     seed.child(0));
      }
      stage = "mc sweep";
      res = mc_rate_experiment(sampler, ref, k, sizes(cfg.get_ints("estimator", "M")), R, q, nk, seed.child(1), opts);
      body["reference"] = {{"provenance", to_string(ref.provenance)}, {"note", ref.note}};
    }
    for (const auto& p : res.points) work_units += p.work_units * double(R);
    emit("rates.csv", rate_csv(res, n_name, norm_name));
    if (fittable(res.points)) body["fit"] = fit_json(res.fit);
  }

  void mlmc_run() {
    stage = "model";
    auto model = make_model(cfg);
    require(model != nullptr, ErrorKind::Config, "mlmc-run needs a level model");
    MlmcRunOptions o;
    o.k = int(cfg.get_int("space", "k"));
    o.q = error_q(cfg);
    o.runs = std::size_t(cfg.get_int("experiment", "runs"));
    o.norm = norm_kind_from_string(cfg.get_str("estimator", "norm"));
    o.epsilons = cfg.get_reals("allocator", "epsilon");
    o.alloc = allocator_inputs(cfg);
    o.C_ML = cfg.get_real("allocator", "C_ML");
    o.pilot_levels.clear();
    for (auto l : cfg.get_ints("allocator", "pilot_levels")) o.pilot_levels.push_back(int(l));
    o.pilot_samples = std::size_t(cfg.get_int("allocator", "pilot_samples"));
    o.max_level = int(cfg.get_int("allocator", "max_level"));
    o.reference_extra = int(cfg.get_int("allocator", "reference_extra"));
    o.reference_samples = std::size_t(cfg.get_int("estimator", "reference_samples"));
    stage = "mlmc sweep";
    MlmcRunResult res = mlmc_run_experiment(*model, o, seed);
    std::string csv = "epsilon,L,achieved_error,se,work_units,predicted_cost,single_level_cost,regime,norm_kind,seed\n";
    for (std::size_t i = 0; i < res.rows.size(); ++i) {
      const auto& r = res.rows[i];
      csv += format_double(r.epsilon) + "," + std::to_string(r.plan.L) + "," + format_double(r.achieved.value) + "," +
             format_double(r.achieved.standard_error) + "," + format_double(r.work_units) + "," +
             format_double(r.predicted_cost) + "," + format_double(r.single_level_cost) + "," +
             to_string(r.plan.regime) + "," + to_string(o.norm) + "," + r.seed + "\n";
      emit("plan_" + std::to_string(i) + ".json", plan_to_json(r.plan));
      work_units += r.work_units * double(o.runs);
    }
    emit("mlmc.csv", csv);
    body["calibration"] = {{"C_beta", res.calibration.C_beta}, {"C_stab", res.calibration.C_stab},
                           {"bracket", res.calibration.bracket}, {"C_alpha", res.C_alpha}, {"C_star", res.C_star}};
    if (res.rows.size() >= 4) body["cost_fit"] = fit_json(res.cost_fit);
  }

  void allocate_only() {
    AllocatorInputs in = allocator_inputs(cfg);
    if (in.C_alpha <= 0.0 || in.C_star <= 0.0) {
      stage = "calibration";
      auto model = make_model(cfg);
      require(model != nullptr, ErrorKind::Config, "calibration needs a level model; otherwise set C_alpha and C_star");
      const int k = int(cfg.get_int("space", "k"));
      std::vector<int> pl;
      for (auto l : cfg.get_ints("allocator", "pilot_levels")) pl.push_back(int(l));
      Calibration cal = calibrate_c_star(*model, k, error_q(cfg), in.beta,
                                         cfg.get_real("allocator", "C_ML"), pl,
                                         std::size_t(cfg.get_int("allocator", "pilot_samples")), seed.child(0));
      if (in.C_star <= 0.0) in.C_star = cal.C_star;
      if (in.C_alpha <= 0.0) in.C_alpha = double(k) * std::pow(cal.C_stab, k - 1) * cal.C_beta;
      body["calibration"] = {{"C_beta", cal.C_beta}, {"C_stab", cal.C_stab}, {"bracket", cal.bracket}};
    }
    const int max_level = int(cfg.get_int("allocator", "max_level"));
    auto model = make_model(cfg);
    for (int l = 1; l <= max_level; ++l) in.N.push_back(model ? model->size(l) : std::ldexp(1.0, l));
    stage = "allocation";
    std::string csv = "epsilon,L,S_L,M,predicted_cost,error_budget,regime\n";
    auto eps = cfg.get_reals("allocator", "epsilon");
    for (std::size_t i = 0; i < eps.size(); ++i) {
      in.epsilon = eps[i];
      MlmcPlan plan = allocate(in);
      std::string ms;
      for (auto m : plan.M) ms += (ms.empty() ? "" : " ") + std::to_string(m);
      csv += format_double(eps[i]) + "," + std::to_string(plan.L) + "," + format_double(plan.S_L) + "," + ms + "," +
             format_double(predicted_cost(plan).cost) + "," + format_double(error_budget(plan)) + "," +
             to_string(plan.regime) + "\n";
      emit("plan_" + std::to_string(i) + ".json", plan_to_json(plan));
    }
    emit("allocate.csv", csv);
  }

  void tensor_norm() {
    const std::string path = cfg.get_str("tensor", "input");
    require(!path.empty(), ErrorKind::Config, "[tensor] input must name a tensor JSON file");
    stage = "load tensor";
    SymmetricTensorRep U = tensor_from_json(read_file(path));
    AscentOptions opts;
    opts.restarts = int(cfg.get_int("estimator", "restarts"));
    opts.seed = seed.key();
    stage = "norms";
    std::vector<NormRecord> rows;
    for (const auto& name : cfg.get_strs("tensor", "norms")) {
      NormKind nk = norm_kind_from_string(name);
      NormRecord r{name, 0.0, false, 0, seed.to_string()};
      switch (nk) {
        case NormKind::EpsS: {
          InjectiveResult ir = injective_norm(U, opts);
          r.value = ir.value;
          r.exact = ir.exact;
          r.restarts = ir.restarts;
          break;
        }
        case NormKind::PiUpper: r.value = projective_norm_upper(U); break;
        case NormKind::HilbertK2Exact: r.value = hilbert_k2_oracles(U).spectral; r.exact = true; break;
        case NormKind::HilbertK2Nuclear: r.value = hilbert_k2_oracles(U).nuclear; r.exact = true; break;
      }
      rows.push_back(r);
    }
    emit("norms.csv", norm_report_csv(rows));
  }

  void counterexample() {
    const double q = cfg.get_real("counterexample", "q");
    const std::size_t R = std::size_t(cfg.get_int("experiment", "runs"));
    stage = "pi sweep";
    std::string csv = "M,n,q,pi_error,pi_se,pi_bound_q,eps_error,eps_se,seed\n";
    for (std::size_t M : sizes(cfg.get_ints("counterexample", "M"))) {
      CounterexampleReport r = counterexample_experiment(q, M, seed.child(0).child(M), R);
      csv += std::to_string(M) + "," + std::to_string(r.n) + "," + format_double(q) + "," +
             format_double(r.pi_error.value) + "," + format_double(r.pi_error.standard_error) + "," +
             format_double(r.pi_bound_q) + "," + format_double(r.eps_error.value) + "," +
             format_double(r.eps_error.standard_error) + "," + r.seed + "\n";
    }
    emit("counterexample.csv", csv);
    stage = "eps sweep";
    const std::size_t n = std::size_t(cfg.get_int("counterexample", "eps_n"));
    RateResult sweep;
    for (std::size_t M : sizes(cfg.get_ints("counterexample", "eps_M"))) {
      CounterexampleReport r = counterexample_experiment(q, M, seed.child(1).child(M), R, n);
      sweep.points.push_back({double(M), r.eps_error.value, r.eps_error.standard_error, 0.0, r.seed});
    }
    emit("eps_sweep.csv", rate_csv(sweep, "M", "hilbert_k2_exact"));
    if (fittable(sweep.points)) body["eps_fit"] = fit_json(rate_regression(sweep.points));
  }

  void property_suite() {
    stage = "property suite";
    PropertyReport rep = probabilistic_property_suite(std::size_t(cfg.get_int("experiment", "trials")), seed);
    ordered_json arr = ordered_json::array();
    for (const auto& c : rep.checks)
      arr.push_back({{"check_name", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"slack", c.slack}, {"pass", c.pass},
                     {"exhaustive", c.exhaustive}, {"detail", c.detail}});
    ordered_json j = {{"seed", seed.to_string()}, {"checks", arr}, {"all_pass", rep.all_pass()}};
    emit("property_suite.json", j.dump(2) + "\n");
    summary.pass = rep.all_pass();
    body["all_pass"] = summary.pass;
  }
};

}  // namespace

RunSummary run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
  namespace fs = std::filesystem;
  const auto t0 = std::chrono::steady_clock::now();
  fs::create_directories(out_dir);
  Runner run{cfg, fs::path(out_dir), SeedSpec{cfg.get_uint("experiment", "seed"), {}}, {}, {}, 0.0, "setup"};
  run.summary.kind = cfg.get_str("experiment", "kind");
  run.emit("config.ini", cfg.canonical());

  auto manifest = [&](const std::string& status, const std::string& message) {
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ordered_json m;
    m["schema_version"] = kSummarySchemaVersion;
    m["status"] = status;
    if (status != "ok") {
      m["failed_stage"] = run.stage;
      m["message"] = message;
      m["partial_outputs"] = run.summary.files;
    }
    m["kind"] = run.summary.kind;
    m["version"] = BMC_VERSION;
    m["seed_root"] = run.seed.root;
    m["simd"] = kernels::active().name;
    m["wall_seconds"] = wall;
    m["work_units"] = run.work_units;
    m["files"] = run.summary.files;
    write_file((run.dir / "manifest.json").string(), m.dump(2) + "\n");
  };

  try {
    const std::string& k = run.summary.kind;
    if (k == "mc-rate") run.mc_rate();
    else if (k == "mlmc-run") run.mlmc_run();
    else if (k == "allocate") run.allocate_only();
    else if (k == "tensor-norm") run.tensor_norm();
    else if (k == "counterexample") run.counterexample();
    else if (k == "property-suite") run.property_suite();
    else fail(ErrorKind::Config, "unknown experiment kind '" + k + "'");
    ordered_json s;
    s["schema_version"] = kSummarySchemaVersion;
    s["kind"] = k;
    s["seed"] = run.seed.to_string();
    s["result"] = run.body;
    run.emit("summary.json", s.dump(2) + "\n");
  } catch (const Error& e) {
    manifest("failed", e.message());
    fail(e.kind(), "stage '" + run.stage + "': " + e.message());
  }
  manifest("ok", "");
  run.summary.files.push_back("manifest.json");
  return run.summary;
}

}  // namespace bmc
