#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "bmc/kernels.hpp"

using namespace bmc;

namespace {

std::vector<double> random_vec(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  std::vector<double> v(n);
  for (double& x : v) x = nd(rng);
  return v;
}

// Sums are reassociated by the vector path, so compare relative to the
// magnitude of the summands.
void check_close(double a, double b, double scale) { CHECK(std::fabs(a - b) <= 1e-13 * (1.0 + scale)); }

}  // namespace

TEST_SUITE("kernels") {
TEST_CASE("scalar reference on hand values") {
  const auto& s = kernels::scalar();
  std::vector<double> a{3, -4, 0}, b{1, 2, 3};
  CHECK(s.dot(a.data(), b.data(), 3) == -5.0);
  CHECK(s.sum_sq(a.data(), 3) == 25.0);
  CHECK(s.sum_abs(a.data(), 3) == 7.0);
  CHECK(s.max_abs(a.data(), 3) == 4.0);
  s.axpy(2.0, a.data(), b.data(), 3);
  CHECK(b == std::vector<double>{7, -6, 3});
  // f(t) = t on 4 nodes with h = 1/3, delta = 1/2: every gap g gives g*h / (g*h)^{1/2}.
  std::vector<double> f{0, 1.0 / 3, 2.0 / 3, 1}, inv(4);
  for (int g = 1; g < 4; ++g) inv[g] = 1.0 / std::sqrt(g / 3.0);
  CHECK(s.holder_uniform(f.data(), 4, inv.data()) == doctest::Approx(1.0));
}

TEST_CASE("avx2 variant matches the scalar reference") {
  const kernels::Table* v = kernels::avx2();
  if (!v) {
    MESSAGE("AVX2 variant unavailable on this machine; only the reference path is exercised");
    return;
  }
  const auto& s = kernels::scalar();
  std::mt19937_64 rng(7);
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 15u, 16u, 17u, 33u, 100u, 1023u}) {
    auto a = random_vec(n, rng), b = random_vec(n, rng);
    double scale = s.sum_abs(a.data(), n) * (1.0 + s.max_abs(b.data(), n));
    check_close(v->dot(a.data(), b.data(), n), s.dot(a.data(), b.data(), n), scale);
    check_close(v->sum_sq(a.data(), n), s.sum_sq(a.data(), n), s.sum_sq(a.data(), n));
    check_close(v->sum_abs(a.data(), n), s.sum_abs(a.data(), n), s.sum_abs(a.data(), n));
    CHECK(v->max_abs(a.data(), n) == s.max_abs(a.data(), n));

    auto y1 = b, y2 = b;
    s.axpy(0.37, a.data(), y1.data(), n);
    v->axpy(0.37, a.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) check_close(y1[i], y2[i], std::fabs(y1[i]));

    if (n >= 2) {
      std::vector<double> inv(n);
      for (std::size_t g = 1; g < n; ++g) inv[g] = std::pow(double(g), -0.3);
      check_close(v->holder_uniform(a.data(), n, inv.data()), s.holder_uniform(a.data(), n, inv.data()), 1.0);
    }
  }
  for (auto [rows, cols] : {std::pair<std::size_t, std::size_t>{1, 1}, {5, 3}, {9, 8}, {17, 13}, {64, 33}}) {
    auto X = random_vec(rows * cols, rng), g = random_vec(cols, rng), w = random_vec(rows, rng);
    std::vector<double> o1(rows), o2(rows), t1(cols), t2(cols);
    s.gemv(X.data(), rows, cols, g.data(), o1.data());
    v->gemv(X.data(), rows, cols, g.data(), o2.data());
    for (std::size_t i = 0; i < rows; ++i) check_close(o1[i], o2[i], double(cols) * 10.0);
    s.gemv_t(X.data(), rows, cols, w.data(), t1.data());
    v->gemv_t(X.data(), rows, cols, w.data(), t2.data());
    for (std::size_t j = 0; j < cols; ++j) check_close(t1[j], t2[j], double(rows) * 10.0);
  }
}
}
