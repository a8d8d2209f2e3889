#pragma once

#include <cstddef>

// Dense double-precision inner loops behind the whole library.  A scalar
// reference implementation always exists; an AVX2+FMA variant is selected at
// runtime when the CPU supports it.  Both variants are equivalence-tested
// against each other (see tests/test_kernels.cpp).
//
// Matrices are row-major n x n, vectors contiguous length n.

namespace matgrowth::kernels {

enum class Backend { Auto, Scalar, Avx2 };

struct Table {
  // s = sum_i a[i]*b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y = A x
  void (*matvec)(const double* A, const double* x, double* y, std::size_t n);
  // C = A B
  void (*matmul)(const double* A, const double* B, double* C, std::size_t n);
  // y += alpha x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // x *= alpha
  void (*scale)(double alpha, double* x, std::size_t n);
  // max_i |x[i]|
  double (*inf_norm)(const double* x, std::size_t n);
  // max_i |a[i]-b[i]|
  double (*max_abs_diff)(const double* a, const double* b, std::size_t n);
  const char* name;
};

/// Currently selected kernel table. First use resolves Backend::Auto.
const Table& active();

/// Force a backend (tests use this). Avx2 falls back to scalar if the CPU
/// lacks support.
void select_backend(Backend b);

/// True when the AVX2 variant was compiled in and the CPU supports it.
bool avx2_available();

extern const Table scalar_table;

/// AVX2 table, or nullptr when the lane was not compiled for this target.
const Table* avx2_table();

}  // namespace matgrowth::kernels
