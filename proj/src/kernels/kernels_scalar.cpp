#include <algorithm>
#include <cmath>

#include "bmc/kernels.hpp"

namespace bmc::kernels {
namespace {

double dot_ref(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum_sq_ref(const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * a[i];
  return s;
}

double sum_abs_ref(const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::fabs(a[i]);
  return s;
}

double max_abs_ref(const double* a, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(a[i]));
  return m;
}

void axpy_ref(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void gemv_ref(const double* X, std::size_t rows, std::size_t cols, const double* g, double* out) {
  for (std::size_t j = 0; j < rows; ++j) out[j] = dot_ref(X + j * cols, g, cols);
}

void gemv_t_ref(const double* X, std::size_t rows, std::size_t cols, const double* w, double* out) {
  std::fill(out, out + cols, 0.0);
  for (std::size_t j = 0; j < rows; ++j) axpy_ref(w[j], X + j * cols, out, cols);
}

double holder_uniform_ref(const double* f, std::size_t n, const double* inv_pow) {
  double best = 0.0;
  for (std::size_t g = 1; g < n; ++g) {
    double m = 0.0;
    for (std::size_t i = 0; i + g < n; ++i) m = std::max(m, std::fabs(f[i + g] - f[i]));
    best = std::max(best, inv_pow[g] * m);
  }
  return best;
}

}  // namespace

const Table& scalar() {
  static const Table table{Isa::Scalar, "scalar", dot_ref,  sum_sq_ref, sum_abs_ref,
                           max_abs_ref, axpy_ref, gemv_ref, gemv_t_ref, holder_uniform_ref};
  return table;
}

}  // namespace bmc::kernels
