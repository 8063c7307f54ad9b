#include "bmc/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <sstream>

#include "bmc/error.hpp"

namespace bmc {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Minimizes (sign = +1) or maximizes (sign = -1) h on [lo, hi] by golden section.
template <class F>
double golden_extremum(F h, double lo, double hi, double sign) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = sign * h(c), fd = sign * h(d);
  for (int i = 0; i < 80 && b - a > 1e-15 * std::max(1.0, std::fabs(a)); ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = sign * h(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = sign * h(d);
    }
  }
  return std::min({sign * h(a), sign * h(b), fc, fd}) * sign;
}

// Extremum of h over [lo, hi] from an oversampled scan, polished around the
// best scan point.
template <class F>
double interval_extremum(F h, double lo, double hi, std::size_t samples, double sign) {
  double best = sign * h(lo);
  std::size_t arg = 0;
  for (std::size_t i = 1; i <= samples; ++i) {
    double x = lo + (hi - lo) * double(i) / double(samples);
    double v = sign * h(x);
    if (v < best) {
      best = v;
      arg = i;
    }
  }
  double step = (hi - lo) / double(samples);
  double a = std::max(lo, lo + step * (double(arg) - 1.0));
  double b = std::min(hi, lo + step * (double(arg) + 1.0));
  double polished = sign * golden_extremum(h, a, b, sign);
  return sign * std::min(best, polished);
}

}  // namespace

SeedSpec SeedSpec::child(std::uint64_t i) const {
  SeedSpec s = *this;
  s.path.push_back(i);
  return s;
}

std::uint64_t SeedSpec::key() const {
  std::uint64_t k = splitmix64(root);
  std::uint64_t depth = 0;
  for (std::uint64_t p : path) {
    ++depth;
    k = splitmix64(k ^ splitmix64(p + 0x632be59bd9b4e019ULL * depth));
  }
  return k;
}

std::string SeedSpec::to_string() const {
  std::ostringstream os;
  os << root;
  for (auto p : path) os << '/' << p;
  return os.str();
}

std::vector<double> draw_family(FamilyKind kind, std::size_t M, const SeedSpec& seed) {
  require(M >= 1, ErrorKind::InvalidArgument, "draw_family needs M >= 1");
  Stream rng(seed);
  std::vector<double> out(M);
  for (double& x : out) x = kind == FamilyKind::Rademacher ? rng.rademacher() : rng.normal();
  return out;
}

// ---------------------------------------------------------------------------

void KlFieldConfig::validate() const {
  require(length > 0.0, ErrorKind::InvalidArgument, "KL field needs length > 0");
  require(oversample >= 1, ErrorKind::InvalidArgument, "oversample must be >= 1");
  for (double s : sigma) require(s >= 0.0 && std::isfinite(s), ErrorKind::InvalidArgument, "KL amplitudes must be >= 0");
  if (!breakpoints.empty()) {
    require(breakpoints.size() >= 2 && breakpoints.front() == 0.0 && breakpoints.back() == length,
            ErrorKind::InvalidArgument, "partition must start at 0 and end at b");
    for (std::size_t i = 1; i < breakpoints.size(); ++i)
      require(breakpoints[i] > breakpoints[i - 1], ErrorKind::InvalidArgument, "partition not increasing");
  }
}

double kl_g(const KlFieldConfig& cfg, const std::vector<double>& xi, double x) {
  double g = 0.0, w = std::numbers::pi * x / cfg.length;
  for (std::size_t m = 0; m < cfg.sigma.size(); ++m) g += cfg.sigma[m] * xi[m] * std::cos(double(m + 1) * w);
  return g;
}

double kl_g_prime(const KlFieldConfig& cfg, const std::vector<double>& xi, double x) {
  double g = 0.0, k0 = std::numbers::pi / cfg.length;
  for (std::size_t m = 0; m < cfg.sigma.size(); ++m) {
    double km = double(m + 1) * k0;
    g -= cfg.sigma[m] * xi[m] * km * std::sin(km * x);
  }
  return g;
}

std::vector<double> kl_draw_modes(const KlFieldConfig& cfg, Stream& rng) {
  std::vector<double> xi(cfg.sigma.size());
  for (double& x : xi) x = rng.normal();
  return xi;
}

KlFieldSample kl_field_eval(const KlFieldConfig& cfg, const std::vector<double>& grid, std::vector<double> xi) {
  cfg.validate();
  require(xi.size() == cfg.sigma.size(), ErrorKind::DimensionMismatch, "mode count mismatch");
  require(grid.size() >= 2 && grid.front() == 0.0 && std::fabs(grid.back() - cfg.length) <= 1e-12 * cfg.length,
          ErrorKind::InvalidArgument, "grid must span [0, b]");
  std::vector<double> bps = cfg.breakpoints.empty() ? std::vector<double>{0.0, cfg.length} : cfg.breakpoints;
  std::vector<std::size_t> bp_node(bps.size());
  for (std::size_t i = 0; i < bps.size(); ++i) {
    auto it = std::lower_bound(grid.begin(), grid.end(), bps[i] - 1e-12 * cfg.length);
    require(it != grid.end() && std::fabs(*it - bps[i]) <= 1e-12 * cfg.length, ErrorKind::InvalidArgument,
            "grid does not contain the partition breakpoint " + std::to_string(bps[i]));
    bp_node[i] = std::size_t(it - grid.begin());
  }

  KlFieldSample s;
  s.xi = std::move(xi);
  const std::size_t n = grid.size();
  s.g_nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.g_nodes[i] = kl_g(cfg, s.xi, grid[i]);
  s.g_prime.resize(n - 1);
  s.a_mid.resize(n - 1);
  for (std::size_t e = 0; e + 1 < n; ++e) {
    double xm = 0.5 * (grid[e] + grid[e + 1]);
    s.g_prime[e] = kl_g_prime(cfg, s.xi, xm);
    s.a_mid[e] = std::exp(kl_g(cfg, s.xi, xm));
  }

  auto g = [&](double x) { return kl_g(cfg, s.xi, x); };
  auto ap = [&](double x) { return std::exp(kl_g(cfg, s.xi, x)) * std::fabs(kl_g_prime(cfg, s.xi, x)); };
  s.a_lo = std::numeric_limits<double>::infinity();
  s.a_hi = 0.0;
  s.a_prime_hi = 0.0;
  for (std::size_t j = 0; j + 1 < bps.size(); ++j) {
    std::size_t cells = bp_node[j + 1] - bp_node[j];
    std::size_t samples = cells * std::size_t(cfg.oversample) * std::max<std::size_t>(1, cfg.sigma.size() / 8 + 1);
    double lo = bps[j], hi = bps[j + 1];
    double gmin = interval_extremum(g, lo, hi, samples, 1.0);
    double gmax = interval_extremum(g, lo, hi, samples, -1.0);
    double apmax = interval_extremum(ap, lo, hi, samples, -1.0);
    s.a_lo_part.push_back(std::exp(gmin));
    s.a_hi_part.push_back(std::exp(gmax));
    s.a_prime_hi_part.push_back(apmax);
    s.a_lo = std::min(s.a_lo, s.a_lo_part.back());
    s.a_hi = std::max(s.a_hi, s.a_hi_part.back());
    s.a_prime_hi = std::max(s.a_prime_hi, apmax);
  }
  return s;
}

KlFieldSample kl_field_sample(const KlFieldConfig& cfg, const std::vector<double>& grid, const SeedSpec& seed) {
  Stream rng(seed);
  return kl_field_eval(cfg, grid, kl_draw_modes(cfg, rng));
}

BanachVector uniform_basis_sample(std::size_t n, const SeedSpec& seed) {
  require(n >= 1, ErrorKind::InvalidArgument, "uniform basis sample needs n >= 1");
  Stream rng(seed);
  return uniform_basis_sample(make_sequence_space(n, 2.0), rng);
}

BanachVector uniform_basis_sample(const SpacePtr& l2n, Stream& rng) {
  std::vector<double> c(l2n->dimension(), 0.0);
  c[rng.index(c.size())] = 1.0;
  return BanachVector(l2n, std::move(c));
}

}  // namespace bmc
