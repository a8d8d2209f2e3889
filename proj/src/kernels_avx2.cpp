// AVX2+FMA variants of the dense kernels. This translation unit is compiled
// with -mavx2 -mfma on x86-64 only; elsewhere it degrades to a stub table.
// Remainder elements are handled by scalar tail loops.

#include "matgrowth/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <cstring>

namespace matgrowth::kernels {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

inline double hmax(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_max_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_max_sd(lo, swapped));
}

const __m256d kAbsMask =
    _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i),
                           acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4),
                           _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i),
                           acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void matvec_avx2(const double* A, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = dot_avx2(A + i * n, x, n);
}

void matmul_avx2(const double* A, const double* B, double* C, std::size_t n) {
  std::memset(C, 0, n * n * sizeof(double));
  for (std::size_t i = 0; i < n; ++i) {
    double* crow = C + i * n;
    for (std::size_t k = 0; k < n; ++k) {
      const double a = A[i * n + k];
      if (a == 0.0) continue;
      const __m256d av = _mm256_set1_pd(a);
      const double* brow = B + k * n;
      std::size_t j = 0;
      for (; j + 4 <= n; j += 4) {
        __m256d c = _mm256_loadu_pd(crow + j);
        c = _mm256_fmadd_pd(av, _mm256_loadu_pd(brow + j), c);
        _mm256_storeu_pd(crow + j, c);
      }
      for (; j < n; ++j) crow[j] += a * brow[j];
    }
  }
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d av = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d yv = _mm256_loadu_pd(y + i);
    yv = _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), yv);
    _mm256_storeu_pd(y + i, yv);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale_avx2(double alpha, double* x, std::size_t n) {
  const __m256d av = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_mul_pd(av, _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) x[i] *= alpha;
}

double inf_norm_avx2(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_max_pd(acc, _mm256_and_pd(kAbsMask, _mm256_loadu_pd(x + i)));
  }
  double m = hmax(acc);
  for (; i < n; ++i) m = std::max(m, std::fabs(x[i]));
  return m;
}

double max_abs_diff_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_max_pd(acc, _mm256_and_pd(kAbsMask, d));
  }
  double m = hmax(acc);
  for (; i < n; ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

const Table avx2_impl = {dot_avx2,   matvec_avx2,   matmul_avx2,
                         axpy_avx2,  scale_avx2,    inf_norm_avx2,
                         max_abs_diff_avx2, "avx2"};

}  // namespace

const Table* avx2_table() { return &avx2_impl; }

bool avx2_available() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

}  // namespace matgrowth::kernels

#else  // !(__AVX2__ && __FMA__)

namespace matgrowth::kernels {
const Table* avx2_table() { return nullptr; }
bool avx2_available() { return false; }
}  // namespace matgrowth::kernels

#endif
