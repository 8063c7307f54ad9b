#include <cmath>
#include <sstream>

#include "bmc/error.hpp"
#include "bmc/models.hpp"

namespace bmc {

namespace {

// Every preset has affine coefficients: mu(x) = a x + b, sigma(x) = c x + e.
struct Affine {
  double a = 0, b = 0, c = 0, e = 0;
};

double param(const SdeSpec& s, std::size_t i, double dflt) { return i < s.params.size() ? s.params[i] : dflt; }

Affine affine(const SdeSpec& s) {
  Affine f;
  if (s.preset == "gbm") {
    f.a = param(s, 0, 0.0);
    f.c = param(s, 1, 1.0);
  } else if (s.preset == "ou") {
    double theta = param(s, 0, 1.0), mean = param(s, 1, 0.0);
    f.a = -theta;
    f.b = theta * mean;
    f.e = param(s, 2, 1.0);
  } else if (s.preset == "linear") {
    f.a = param(s, 0, 0.0);
    f.b = param(s, 1, 0.0);
    f.c = param(s, 2, 0.0);
    f.e = param(s, 3, 0.0);
  } else if (s.preset == "const_drift") {
    f.b = param(s, 0, 1.0);
  } else if (s.preset != "zero") {
    fail(ErrorKind::InvalidArgument, "unknown SDE preset '" + s.preset + "'\n" + sde_preset_help());
  }
  return f;
}

std::size_t max_params(const std::string& preset) {
  if (preset == "gbm") return 2;
  if (preset == "ou") return 3;
  if (preset == "linear") return 4;
  if (preset == "const_drift") return 1;
  return 0;
}

}  // namespace

std::string sde_preset_help() {
  return "SDE presets (componentwise, independent Brownian motions):\n"
         "  gbm          params mu sigma          dX = mu X dt + sigma X dB   (default 0 1)\n"
         "  ou           params theta mean sigma  dX = theta (mean - X) dt + sigma dB  (default 1 0 1)\n"
         "  linear       params a b c e           dX = (a X + b) dt + (c X + e) dB\n"
         "  const_drift  params c                 dX = c dt\n"
         "  zero                                  dX = 0\n";
}

double SdeSpec::drift(double x) const {
  Affine f = affine(*this);
  return f.a * x + f.b;
}

double SdeSpec::diffusion(double x) const {
  Affine f = affine(*this);
  return f.c * x + f.e;
}

void SdeSpec::validate() const {
  affine(*this);
  require(params.size() <= max_params(preset), ErrorKind::InvalidArgument, "too many parameters for preset " + preset);
  require(!x0.empty(), ErrorKind::InvalidArgument, "SDE needs an initial value");
  require(T > 0.0, ErrorKind::InvalidArgument, "SDE horizon T must be positive");
}

std::vector<double> em_nodes(const SdeSpec& spec, std::size_t N, const std::vector<double>& increments) {
  const std::size_t d = spec.dim();
  require(N >= 1, ErrorKind::InvalidArgument, "EM needs N >= 1");
  require(increments.size() == N * d, ErrorKind::DimensionMismatch, "EM needs N * d Brownian increments");
  const Affine f = affine(spec);
  const double dt = spec.T / double(N);
  std::vector<double> y((N + 1) * d);
  for (std::size_t c = 0; c < d; ++c) y[c] = spec.x0[c];
  for (std::size_t j = 0; j < N; ++j)
    for (std::size_t c = 0; c < d; ++c) {
      double x = y[j * d + c];
      double nx = x + (f.a * x + f.b) * dt + (f.c * x + f.e) * increments[j * d + c];
      if (!std::isfinite(nx))
        fail(ErrorKind::Numerical, "Euler-Maruyama produced a non-finite value at step " + std::to_string(j));
      y[(j + 1) * d + c] = nx;
    }
  return y;
}

BanachVector em_path(const SdeSpec& spec, std::size_t N, const std::vector<double>& increments,
                     const SpacePtr& out_space) {
  require(out_space->kind == SpaceKind::HolderPath && out_space->value_dim == spec.dim(), ErrorKind::SpaceMismatch,
          "EM output needs a Hölder path space of matching dimension");
  require(std::fabs(out_space->grid.back() - spec.T) <= 1e-12 * spec.T && out_space->grid.front() == 0.0,
          ErrorKind::SpaceMismatch, "output grid must span [0, T]");
  auto y = em_nodes(spec, N, increments);
  const std::size_t d = spec.dim();
  const auto& g = out_space->grid;
  std::vector<double> out(g.size() * d);
  const double dt = spec.T / double(N);
  for (std::size_t i = 0; i < g.size(); ++i) {
    double pos = g[i] / dt;
    std::size_t j = std::min<std::size_t>(N - 1, std::size_t(std::floor(pos)));
    double lam = std::clamp(pos - double(j), 0.0, 1.0);
    for (std::size_t c = 0; c < d; ++c) {
      double a = y[j * d + c], b = y[(j + 1) * d + c];
      out[i * d + c] = lam == 0.0 ? a : (lam == 1.0 ? b : a + lam * (b - a));
    }
  }
  return BanachVector(out_space, std::move(out));
}

std::vector<double> coarsen_increments(const std::vector<double>& fine, std::size_t factor, std::size_t d) {
  require(factor >= 1 && d >= 1, ErrorKind::InvalidArgument, "coarsen needs factor, d >= 1");
  require(fine.size() % (factor * d) == 0, ErrorKind::InvalidArgument,
          "fine increment count is not a multiple of the refinement factor");
  const std::size_t nc = fine.size() / (factor * d);
  std::vector<double> out(nc * d, 0.0);
  for (std::size_t j = 0; j < nc; ++j)
    for (std::size_t r = 0; r < factor; ++r)
      for (std::size_t c = 0; c < d; ++c) out[j * d + c] += fine[(j * factor + r) * d + c];
  return out;
}

std::vector<double> bridge_refine(const std::vector<double>& coarse, std::size_t factor, double dt_fine, Stream& rng,
                                  std::size_t d) {
  require(factor >= 1 && d >= 1, ErrorKind::InvalidArgument, "bridge_refine needs factor, d >= 1");
  require(coarse.size() % d == 0, ErrorKind::DimensionMismatch, "coarse increments not a multiple of d");
  const std::size_t nc = coarse.size() / d;
  const double sd = std::sqrt(dt_fine);
  std::vector<double> out(nc * factor * d), z(factor);
  for (std::size_t j = 0; j < nc; ++j)
    for (std::size_t c = 0; c < d; ++c) {
      double sum = 0.0;
      for (auto& v : z) {
        v = sd * rng.normal();
        sum += v;
      }
      double shift = (sum - coarse[j * d + c]) / double(factor);
      double partial = 0.0;
      for (std::size_t r = 0; r + 1 < factor; ++r) {
        double v = z[r] - shift;
        out[(j * factor + r) * d + c] = v;
        partial += v;
      }
      out[(j * factor + factor - 1) * d + c] = coarse[j * d + c] - partial;
    }
  return out;
}

std::vector<double> gbm_exact_nodes(double x0, double mu, double sigma, double T, const std::vector<double>& increments) {
  const std::size_t N = increments.size();
  const double dt = T / double(N);
  std::vector<double> x(N + 1);
  double B = 0.0;
  x[0] = x0;
  for (std::size_t j = 0; j < N; ++j) {
    B += increments[j];
    x[j + 1] = x0 * std::exp(sigma * B + (mu - 0.5 * sigma * sigma) * dt * double(j + 1));
  }
  return x;
}

// ---------------------------------------------------------------------------

SdeHierarchy::SdeHierarchy(SdeHierarchyConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.spec.validate();
  require(cfg_.n1 >= 1 && cfg_.factor >= 2, ErrorKind::InvalidArgument, "SDE hierarchy needs N_1 >= 1 and A >= 2");
  require(cfg_.output_level >= 1 && cfg_.output_level <= 24, ErrorKind::InvalidArgument, "output level out of range");
  out_space_ = make_holder_uniform(cfg_.spec.T, std::size_t(size(cfg_.output_level)), cfg_.delta, cfg_.spec.dim());
}

SpacePtr SdeHierarchy::space(int level) const {
  require(level >= 1 && level <= cfg_.output_level, ErrorKind::InvalidArgument,
          "SDE level must lie in [1, output_level]");
  return out_space_;
}

double SdeHierarchy::size(int level) const {
  return double(cfg_.n1) * std::pow(double(cfg_.factor), double(level - 1));
}

std::vector<double> SdeHierarchy::increments(int level, const SeedSpec& seed) const {
  const std::size_t N = std::size_t(size(level)), d = cfg_.spec.dim();
  const double sd = std::sqrt(cfg_.spec.T / double(N));
  Stream rng(seed);
  std::vector<double> dB(N * d);
  for (double& v : dB) v = sd * rng.normal();
  return dB;
}

std::vector<BanachVector> SdeHierarchy::solve_levels(const std::vector<int>& levels, const SeedSpec& seed,
                                                     double* work) const {
  require(!levels.empty(), ErrorKind::InvalidArgument, "no levels requested");
  int top = *std::max_element(levels.begin(), levels.end());
  space(top);
  auto fine = increments(top, seed);
  const std::size_t d = cfg_.spec.dim();
  std::vector<BanachVector> out;
  double total = 0.0;
  for (int l : levels) {
    space(l);
    std::vector<double> dB = fine;
    for (int m = top; m > l; --m) dB = coarsen_increments(dB, cfg_.factor, d);
    std::size_t N = std::size_t(size(l));
    out.push_back(em_path(cfg_.spec, N, dB, out_space_));
    total += double(N * d);
  }
  if (work) *work = total;
  return out;
}

BanachVector SdeHierarchy::embed(const BanachVector& v, int to) const {
  require(same_space(v.space(), *space(to)), ErrorKind::SpaceMismatch, "path not on the output grid");
  return v;
}

}  // namespace bmc
