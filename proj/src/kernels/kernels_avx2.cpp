#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "bmc/kernels.hpp"

namespace bmc::kernels {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

inline double hmax(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_max_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_max_sd(lo, sh));
}

inline __m256d vabs(__m256d v) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v); }

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), s1);
  }
  for (; i + 4 <= n; i += 4)
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
  double s = hsum(_mm256_add_pd(s0, s1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum_sq_avx2(const double* a, std::size_t n) { return dot_avx2(a, a, n); }

double sum_abs_avx2(const double* a, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    s0 = _mm256_add_pd(s0, vabs(_mm256_loadu_pd(a + i)));
    s1 = _mm256_add_pd(s1, vabs(_mm256_loadu_pd(a + i + 4)));
  }
  for (; i + 4 <= n; i += 4) s0 = _mm256_add_pd(s0, vabs(_mm256_loadu_pd(a + i)));
  double s = hsum(_mm256_add_pd(s0, s1));
  for (; i < n; ++i) s += std::fabs(a[i]);
  return s;
}

double max_abs_avx2(const double* a, std::size_t n) {
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) m = _mm256_max_pd(m, vabs(_mm256_loadu_pd(a + i)));
  double r = hmax(m);
  for (; i < n; ++i) r = std::max(r, std::fabs(a[i]));
  return r;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

void gemv_avx2(const double* X, std::size_t rows, std::size_t cols, const double* g, double* out) {
  for (std::size_t j = 0; j < rows; ++j) out[j] = dot_avx2(X + j * cols, g, cols);
}

void gemv_t_avx2(const double* X, std::size_t rows, std::size_t cols, const double* w, double* out) {
  std::fill(out, out + cols, 0.0);
  for (std::size_t j = 0; j < rows; ++j) axpy_avx2(w[j], X + j * cols, out, cols);
}

double holder_uniform_avx2(const double* f, std::size_t n, const double* inv_pow) {
  double best = 0.0;
  for (std::size_t g = 1; g < n; ++g) {
    const std::size_t len = n - g;
    __m256d m = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= len; i += 4) {
      __m256d d = _mm256_sub_pd(_mm256_loadu_pd(f + i + g), _mm256_loadu_pd(f + i));
      m = _mm256_max_pd(m, vabs(d));
    }
    double r = hmax(m);
    for (; i < len; ++i) r = std::max(r, std::fabs(f[i + g] - f[i]));
    best = std::max(best, inv_pow[g] * r);
  }
  return best;
}

}  // namespace

const Table* avx2_table_impl() {
  static const Table table{Isa::Avx2,    "avx2",    dot_avx2,  sum_sq_avx2,  sum_abs_avx2,
                           max_abs_avx2, axpy_avx2, gemv_avx2, gemv_t_avx2, holder_uniform_avx2};
  return &table;
}

}  // namespace bmc::kernels
