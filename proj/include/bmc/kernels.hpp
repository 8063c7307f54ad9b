#pragma once

// Data-parallel inner loops shared by the norm, ascent and Hölder code.
//
// Every kernel has a scalar reference implementation. When the library is
// built on x86-64 an AVX2/FMA variant is compiled into a separate
// translation unit; `active()` picks it at runtime if the CPU supports it.
// Setting BMC_SIMD=scalar in the environment forces the reference path.

#include <cstddef>
#include <span>

namespace bmc::kernels {

enum class Isa { Scalar, Avx2 };

struct Table {
  Isa isa;
  const char* name;

  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum_sq)(const double* a, std::size_t n);
  double (*sum_abs)(const double* a, std::size_t n);
  double (*max_abs)(const double* a, std::size_t n);
  /// y = a*x + y
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  /// out[j] = <X_j, g> for the rows of a row-major rows x cols matrix.
  void (*gemv)(const double* X, std::size_t rows, std::size_t cols, const double* g, double* out);
  /// out = sum_j w[j] * X_j  (out has cols entries and is overwritten).
  void (*gemv_t)(const double* X, std::size_t rows, std::size_t cols, const double* w, double* out);
  /// max over gaps g in [1, n) of inv_pow[g] * max_i |f[i+g] - f[i]|.
  double (*holder_uniform)(const double* f, std::size_t n, const double* inv_pow);
};

const Table& scalar();
/// nullptr when the AVX2 variant was not compiled in or the CPU lacks AVX2/FMA.
const Table* avx2();
const Table& active();

// Convenience wrappers on the active table.
inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}
inline double sum_sq(std::span<const double> a) { return active().sum_sq(a.data(), a.size()); }
inline double sum_abs(std::span<const double> a) { return active().sum_abs(a.data(), a.size()); }
inline double max_abs(std::span<const double> a) { return active().max_abs(a.data(), a.size()); }

}  // namespace bmc::kernels
