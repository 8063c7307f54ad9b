// Monte Carlo and exhaustive checks of the Khintchine, symmetrization,
// contraction and type inequalities.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bmc/error.hpp"
#include "bmc/sampling.hpp"

namespace bmc {

namespace {

struct MeanSe {
  double mean = 0.0, se = 0.0;
};

MeanSe mean_se(const std::vector<double>& v) {
  MeanSe r;
  for (double x : v) r.mean += x;
  r.mean /= double(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - r.mean) * (x - r.mean);
  r.se = v.size() > 1 ? std::sqrt(ss / double(v.size() - 1) / double(v.size())) : 0.0;
  return r;
}

// L_q norm estimate (mean of |X|^q)^{1/q} with a delta-method standard error.
MeanSe lq_from_powers(const std::vector<double>& powers, double q) {
  MeanSe m = mean_se(powers);
  MeanSe r;
  r.mean = std::pow(m.mean, 1.0 / q);
  r.se = m.mean > 0.0 ? r.mean / (q * m.mean) * m.se : 0.0;
  return r;
}

double lp_norm(const std::vector<double>& x, double p) {
  double s = 0.0;
  for (double v : x) s += std::pow(std::fabs(v), p);
  return std::pow(s, 1.0 / p);
}

std::string fmt(const char* key, double v) {
  std::ostringstream os;
  os << key << '=' << v;
  return os.str();
}

// sup over f in the closed unit ball of R^dim (dim 1 or 2, Euclidean) of
// |sum_j z_j <f, x_j>^{k_j}| with k_j in {1,2,3}: radial cubic maximized
// exactly, angle by scan plus golden-section polish.
double sup_poly_ball(const std::vector<double>& z, const std::vector<int>& kk, const std::vector<double>& X,
                     std::size_t dim) {
  const std::size_t M = z.size();
  auto radial = [&](double theta) {
    double u0 = dim == 1 ? (theta < 0.5 ? 1.0 : -1.0) : std::cos(theta);
    double u1 = dim == 1 ? 0.0 : std::sin(theta);
    double A[4] = {0, 0, 0, 0};
    for (std::size_t j = 0; j < M; ++j) {
      double t = u0 * X[j * dim] + (dim == 2 ? u1 * X[j * dim + 1] : 0.0);
      A[kk[j]] += z[j] * std::pow(t, kk[j]);
    }
    auto P = [&](double r) { return std::fabs(A[1] * r + A[2] * r * r + A[3] * r * r * r); };
    double best = P(1.0);
    // roots of A1 + 2 A2 r + 3 A3 r^2
    double a = 3 * A[3], b = 2 * A[2], c = A[1];
    if (std::fabs(a) > 1e-300) {
      double disc = b * b - 4 * a * c;
      if (disc >= 0) {
        double sq = std::sqrt(disc);
        for (double r : {(-b + sq) / (2 * a), (-b - sq) / (2 * a)})
          if (r > 0 && r < 1) best = std::max(best, P(r));
      }
    } else if (std::fabs(b) > 1e-300) {
      double r = -c / b;
      if (r > 0 && r < 1) best = std::max(best, P(r));
    }
    return best;
  };
  if (dim == 1) return std::max(radial(0.0), radial(1.0));
  const int scan = 256;
  const double two_pi = 2 * std::numbers::pi;
  double best = 0.0, arg = 0.0;
  for (int i = 0; i < scan; ++i) {
    double th = two_pi * i / scan;
    double v = radial(th);
    if (v > best) {
      best = v;
      arg = th;
    }
  }
  double lo = arg - two_pi / scan, hi = arg + two_pi / scan;
  const double g = (std::sqrt(5.0) - 1) / 2;
  double c = hi - g * (hi - lo), d = lo + g * (hi - lo), fc = radial(c), fd = radial(d);
  for (int it = 0; it < 60; ++it) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - g * (hi - lo);
      fc = radial(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + g * (hi - lo);
      fd = radial(d);
    }
  }
  return std::max({best, fc, fd});
}

double contraction_rhs(const std::vector<double>& z, const std::vector<int>& kk, const std::vector<double>& X,
                       std::size_t dim) {
  std::vector<double> s(dim, 0.0);
  for (std::size_t j = 0; j < z.size(); ++j) {
    double nx = 0.0;
    for (std::size_t c = 0; c < dim; ++c) nx += X[j * dim + c] * X[j * dim + c];
    nx = std::sqrt(nx);
    double f = z[j] * kk[j] * std::pow(nx, kk[j] - 1);
    for (std::size_t c = 0; c < dim; ++c) s[c] += f * X[j * dim + c];
  }
  return lp_norm(s, 2.0);
}

void khintchine_checks(PropertyReport& rep, std::size_t trials, const SeedSpec& seed) {
  Stream rng(seed.child(0));
  for (double q : {1.0, 2.0, 4.0}) {
    const double A = khintchine_lower(q), B = khintchine_upper(q);
    // exhaustive, M <= 12
    double lo = 1e300, hi = 0.0;
    for (int v = 0; v < 50; ++v) {
      std::size_t M = 2 + rng.index(11);
      std::vector<double> a(M);
      for (double& x : a) x = rng.normal();
      double ratio = rademacher_lq_exact(a, q) / lp_norm(a, 2.0);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    rep.checks.push_back({"khintchine_lower_exhaustive_q" + std::to_string(int(q)), lo, A, 1e-12,
                          lo >= A - 1e-12, true, fmt("min_ratio", lo)});
    rep.checks.push_back({"khintchine_upper_exhaustive_q" + std::to_string(int(q)), hi, B, 1e-12,
                          hi <= B + 1e-12, true, fmt("max_ratio", hi)});
    // Monte Carlo, M = 64. One coefficient vector per q: at q = 2 the ratio
    // sits exactly on the bound, and the worst of many vectors would beat any
    // fixed SE slack by selection alone.
    std::vector<double> a(64), pw(trials);
    for (double& x : a) x = rng.normal();
    const double na = lp_norm(a, 2.0);
    for (std::size_t t = 0; t < trials; ++t) {
      double s = 0.0;
      for (double x : a) s += rng.rademacher() * x;
      pw[t] = std::pow(std::fabs(s), q);
    }
    MeanSe r = lq_from_powers(pw, q);
    const double ratio = r.mean / na, se = r.se / na;
    rep.checks.push_back({"khintchine_lower_mc_q" + std::to_string(int(q)), ratio, A, 3 * se,
                          ratio + 3 * se >= A, false, fmt("ratio", ratio)});
    rep.checks.push_back({"khintchine_upper_mc_q" + std::to_string(int(q)), ratio, B, 3 * se,
                          ratio - 3 * se <= B, false, fmt("ratio", ratio)});
  }
}

void symmetrization_checks(PropertyReport& rep, std::size_t trials, const SeedSpec& seed) {
  Stream rng(seed.child(1));
  const double p = 1.5, q = 2.0;
  // Monte Carlo: eta_j = (Exp(1) - 1) v_j in l_{1.5}^8, M = 16.
  {
    const std::size_t M = 16, d = 8;
    std::vector<double> V(M * d);
    for (double& x : V) x = rng.normal();
    std::exponential_distribution<double> ex(1.0);
    std::vector<double> lhs(trials), rhs(trials), s(d), t(d);
    for (std::size_t i = 0; i < trials; ++i) {
      std::fill(s.begin(), s.end(), 0.0);
      std::fill(t.begin(), t.end(), 0.0);
      for (std::size_t j = 0; j < M; ++j) {
        double e1 = ex(rng.engine()) - 1.0;
        double e2 = ex(rng.engine()) - 1.0;
        double r = rng.rademacher();
        for (std::size_t c = 0; c < d; ++c) {
          s[c] += e1 * V[j * d + c];
          t[c] += r * e2 * V[j * d + c];
        }
      }
      lhs[i] = std::pow(lp_norm(s, p), q);
      rhs[i] = std::pow(lp_norm(t, p), q);
    }
    MeanSe L = lq_from_powers(lhs, q), R = lq_from_powers(rhs, q);
    double slack = 3 * std::sqrt(L.se * L.se + 4 * R.se * R.se);
    rep.checks.push_back({"symmetrization_mc", L.mean, 2 * R.mean, slack, L.mean <= 2 * R.mean + slack, false,
                          "l_1.5^8, M=16, q=2"});
  }
  // Exhaustive: two-point mean-zero eta_j in l_{1.5}^4.
  for (std::size_t M : {4u, 8u, 12u}) {
    const std::size_t d = 4;
    std::vector<double> V(M * d), pi(M);
    for (double& x : V) x = rng.normal();
    for (double& x : pi) x = 0.2 + 0.6 * rng.uniform();
    double lhs = 0.0, rhs = 0.0;
    std::vector<double> s(d), base(M * d);
    const std::size_t n = std::size_t(1) << M;
    for (std::size_t o = 0; o < n; ++o) {
      double prob = 1.0;
      for (std::size_t j = 0; j < M; ++j) {
        bool up = (o >> j) & 1;
        double val = up ? 1.0 - pi[j] : -pi[j];
        prob *= up ? pi[j] : 1.0 - pi[j];
        for (std::size_t c = 0; c < d; ++c) base[j * d + c] = val * V[j * d + c];
      }
      std::fill(s.begin(), s.end(), 0.0);
      for (std::size_t j = 0; j < M; ++j)
        for (std::size_t c = 0; c < d; ++c) s[c] += base[j * d + c];
      lhs += prob * std::pow(lp_norm(s, p), q);
      double inner = 0.0;
      for (std::size_t sg = 0; sg < n; ++sg) {
        std::fill(s.begin(), s.end(), 0.0);
        for (std::size_t j = 0; j < M; ++j) {
          double r = ((sg >> j) & 1) ? 1.0 : -1.0;
          for (std::size_t c = 0; c < d; ++c) s[c] += r * base[j * d + c];
        }
        inner += std::pow(lp_norm(s, p), q);
      }
      rhs += prob * inner / double(n);
    }
    lhs = std::pow(lhs, 1.0 / q);
    rhs = std::pow(rhs, 1.0 / q);
    rep.checks.push_back({"symmetrization_exhaustive_M" + std::to_string(M), lhs, 2 * rhs, 0.0,
                          lhs <= 2 * rhs * (1 + 1e-12), true, "l_1.5^4, two-point eta, q=2"});
  }
}

void contraction_checks(PropertyReport& rep, std::size_t trials, const SeedSpec& seed) {
  Stream rng(seed.child(2));
  for (std::size_t dim : {1u, 2u}) {
    for (int gaussian = 0; gaussian < 2; ++gaussian) {
      const std::size_t M = 8;
      const double Cz = gaussian ? 2.0 : 1.0;
      std::vector<double> X(M * dim);
      for (double& x : X) x = rng.normal();
      std::vector<int> kk(M);
      for (auto& k : kk) k = 1 + int(rng.index(3));
      std::size_t T = std::min<std::size_t>(trials, 20000);
      std::vector<double> diff(T), lhs(T), rhs(T), z(M);
      for (std::size_t t = 0; t < T; ++t) {
        for (double& v : z) v = gaussian ? rng.normal() : rng.rademacher();
        lhs[t] = sup_poly_ball(z, kk, X, dim);
        rhs[t] = 2 * Cz * contraction_rhs(z, kk, X, dim);
        diff[t] = lhs[t] - rhs[t];
      }
      MeanSe D = mean_se(diff), L = mean_se(lhs), R = mean_se(rhs);
      std::string name = std::string("contraction_mc_") + (gaussian ? "gaussian" : "rademacher") + "_dim" +
                         std::to_string(dim);
      rep.checks.push_back({name, L.mean, R.mean, 3 * D.se, D.mean <= 3 * D.se, false, "G(t)=t, k_j in {1,2,3}"});
    }
  }
  // Exhaustive over all sign patterns.
  for (std::size_t M : {3u, 8u, 12u}) {
    const std::size_t dim = 2;
    std::vector<double> X(M * dim);
    for (double& x : X) x = rng.normal();
    std::vector<int> kk(M);
    for (auto& k : kk) k = M == 3 ? 2 : 1 + int(rng.index(3));
    double lhs = 0.0, rhs = 0.0;
    std::vector<double> z(M);
    const std::size_t n = std::size_t(1) << M;
    for (std::size_t sg = 0; sg < n; ++sg) {
      for (std::size_t j = 0; j < M; ++j) z[j] = ((sg >> j) & 1) ? 1.0 : -1.0;
      lhs += sup_poly_ball(z, kk, X, dim);
      rhs += 2 * contraction_rhs(z, kk, X, dim);
    }
    lhs /= double(n);
    rhs /= double(n);
    rep.checks.push_back({"contraction_exhaustive_M" + std::to_string(M), lhs, rhs, 0.0, lhs <= rhs * (1 + 1e-12),
                          true, M == 3 ? "k_j = 2" : "k_j in {1,2,3}"});
  }
}

void type_checks(PropertyReport& rep, std::size_t trials, const SeedSpec& seed) {
  Stream rng(seed.child(3));
  for (double p : {1.0, 1.5, 2.0}) {
    double worst = 0.0, worst_se = 0.0;
    std::size_t worst_n = 0;
    const std::size_t d = 16;
    for (std::size_t nn : {2u, 8u, 32u, 128u, 512u, 1024u}) {
      std::vector<double> X(nn * d);
      for (double& x : X) x = rng.normal();
      double den = 0.0;
      for (std::size_t j = 0; j < nn; ++j) den += std::pow(lp_norm({X.begin() + j * d, X.begin() + (j + 1) * d}, p), p);
      std::size_t T = std::max<std::size_t>(1000, std::min<std::size_t>(trials, 2000000 / nn));
      std::vector<double> pw(T), s(d);
      for (std::size_t t = 0; t < T; ++t) {
        std::fill(s.begin(), s.end(), 0.0);
        for (std::size_t j = 0; j < nn; ++j) {
          double r = rng.rademacher();
          for (std::size_t c = 0; c < d; ++c) s[c] += r * X[j * d + c];
        }
        pw[t] = std::pow(lp_norm(s, p), p);
      }
      MeanSe r = lq_from_powers(pw, p);
      double ratio = r.mean / std::pow(den, 1.0 / p), se = r.se / std::pow(den, 1.0 / p);
      if (ratio > worst) {
        worst = ratio;
        worst_se = se;
        worst_n = nn;
      }
    }
    std::ostringstream name;
    name << "type_ratio_mc_p" << p;
    rep.checks.push_back({name.str(), worst, 1.0, 3 * worst_se,
                          worst - 3 * worst_se <= 1.0, false, "worst n=" + std::to_string(worst_n)});
  }
  // x_j = e_j in l_1^10: ||sum r_j e_j||_1 = n for every sign pattern.
  {
    const std::size_t n = 10;
    double acc = 0.0;
    for (std::size_t sg = 0; sg < (std::size_t(1) << n); ++sg) acc += double(n);
    double ratio = acc / double(std::size_t(1) << n) / double(n);
    rep.checks.push_back({"type_ratio_exhaustive_l1_basis", ratio, 1.0, 0.0, ratio == 1.0, true, "n=10"});
  }
}

}  // namespace

bool PropertyReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

double khintchine_lower(double q) {
  require(q > 0.0, ErrorKind::InvalidArgument, "Khintchine constants need q > 0");
  if (q >= 2.0) return 1.0;
  double gamma_form = std::sqrt(2.0) * std::pow(std::tgamma((q + 1.0) / 2.0) / std::sqrt(std::numbers::pi), 1.0 / q);
  return std::min(std::pow(2.0, 0.5 - 1.0 / q), gamma_form);
}

double khintchine_upper(double q) {
  require(q > 0.0, ErrorKind::InvalidArgument, "Khintchine constants need q > 0");
  if (q <= 2.0) return 1.0;
  return std::sqrt(2.0) * std::pow(std::tgamma((q + 1.0) / 2.0) / std::sqrt(std::numbers::pi), 1.0 / q);
}

double rademacher_lq_exact(const std::vector<double>& a, double q) {
  const std::size_t M = a.size();
  require(M >= 1 && M <= 24, ErrorKind::InvalidArgument, "exhaustive enumeration needs 1 <= M <= 24");
  const std::size_t n = std::size_t(1) << M;
  double acc = 0.0;
  for (std::size_t sg = 0; sg < n; ++sg) {
    double s = 0.0;
    for (std::size_t j = 0; j < M; ++j) s += ((sg >> j) & 1) ? a[j] : -a[j];
    acc += std::pow(std::fabs(s), q);
  }
  return std::pow(acc / double(n), 1.0 / q);
}

PropertyReport probabilistic_property_suite(std::size_t trials, const SeedSpec& seed) {
  require(trials >= 10000, ErrorKind::InvalidArgument, "property suite needs trials >= 1e4");
  PropertyReport rep;
  rep.seed = seed.root;
  khintchine_checks(rep, trials, seed);
  symmetrization_checks(rep, trials, seed);
  contraction_checks(rep, trials, seed);
  type_checks(rep, trials, seed);
  return rep;
}

}  // namespace bmc
