#include "matgrowth/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

namespace matgrowth::kernels {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void matvec_scalar(const double* A, const double* x, double* y,
                   std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = dot_scalar(A + i * n, x, n);
}

void matmul_scalar(const double* A, const double* B, double* C,
                   std::size_t n) {
  std::fill(C, C + n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double* crow = C + i * n;
    for (std::size_t k = 0; k < n; ++k) {
      const double a = A[i * n + k];
      if (a == 0.0) continue;
      const double* brow = B + k * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += a * brow[j];
    }
  }
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_scalar(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

double inf_norm_scalar(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(x[i]));
  return m;
}

double max_abs_diff_scalar(const double* a, const double* b, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

std::atomic<const Table*> g_active{nullptr};

const Table* resolve_auto() {
  if (const Table* t = avx2_table(); t && avx2_available()) return t;
  return &scalar_table;
}

}  // namespace

const Table scalar_table = {dot_scalar,   matvec_scalar,   matmul_scalar,
                            axpy_scalar,  scale_scalar,    inf_norm_scalar,
                            max_abs_diff_scalar, "scalar"};

const Table& active() {
  const Table* t = g_active.load(std::memory_order_acquire);
  if (!t) {
    t = resolve_auto();
    g_active.store(t, std::memory_order_release);
  }
  return *t;
}

void select_backend(Backend b) {
  switch (b) {
    case Backend::Scalar:
      g_active.store(&scalar_table, std::memory_order_release);
      break;
    case Backend::Avx2: {
      const Table* t = avx2_table();
      g_active.store(t && avx2_available() ? t : &scalar_table,
                     std::memory_order_release);
      break;
    }
    case Backend::Auto:
      g_active.store(resolve_auto(), std::memory_order_release);
      break;
  }
}

}  // namespace matgrowth::kernels
