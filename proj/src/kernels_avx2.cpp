#include "kernels_internal.hpp"

#if SOAR_KERNELS_HAVE_AVX2

#include <immintrin.h>

#include <cstddef>

// AVX2/FMA variants. Compiled with per-function target attributes so the
// translation unit builds regardless of the host baseline; dispatch happens
// at runtime in kernels.cpp.

namespace soar::kernels::detail {
namespace {

#define SOAR_AVX2 __attribute__((target("avx2,fma")))

SOAR_AVX2 double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d t = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, t));
}

SOAR_AVX2 double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), s1);
  }
  for (; i + 4 <= n; i += 4)
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), s0);
  double s = hsum(_mm256_add_pd(s0, s1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

SOAR_AVX2 void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

SOAR_AVX2 void scal_avx2(double a, double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] *= a;
}

SOAR_AVX2 void gemv_n_avx2(const double* a, std::size_t m, std::size_t n,
                           const double* x, double* y) {
  for (std::size_t i = 0; i < m; ++i) y[i] = dot_avx2(a + i * n, x, n);
}

SOAR_AVX2 void gemv_t_avx2(const double* a, std::size_t m, std::size_t n,
                           const double* x, double* y) {
  for (std::size_t j = 0; j < n; ++j) y[j] = 0.0;
  for (std::size_t i = 0; i < m; ++i) axpy_avx2(x[i], a + i * n, y, n);
}

#undef SOAR_AVX2

}  // namespace

const KernelTable avx2_table = {dot_avx2, axpy_avx2, scal_avx2,
                                gemv_n_avx2, gemv_t_avx2};

}  // namespace soar::kernels::detail

#endif  // SOAR_KERNELS_HAVE_AVX2
