#include "matgrowth/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "matgrowth/kernels.hpp"

namespace matgrowth {

Matrix::Matrix(std::size_t n, std::vector<double> data)
    : n_(n), data_(std::move(data)) {
  if (data_.size() != n * n) throw std::invalid_argument("matrix data size");
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool Matrix::nonnegative() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double x) { return x >= 0.0; });
}

Vec matvec(const Matrix& A, const Vec& x) {
  Vec y(A.dim());
  kernels::active().matvec(A.data(), x.data(), y.data(), A.dim());
  return y;
}

Matrix matmul(const Matrix& A, const Matrix& B) {
  Matrix C(A.dim());
  kernels::active().matmul(A.data(), B.data(), C.data(), A.dim());
  return C;
}

double dot(std::span<const double> a, std::span<const double> b) {
  return kernels::active().dot(a.data(), b.data(), a.size());
}

double inf_norm(const Vec& v) {
  return kernels::active().inf_norm(v.data(), v.size());
}

double max_abs(const Matrix& A) {
  return kernels::active().inf_norm(A.data(), A.dim() * A.dim());
}

double max_abs_diff(const Vec& a, const Vec& b) {
  return kernels::active().max_abs_diff(a.data(), b.data(), a.size());
}

double max_abs_diff(const Matrix& A, const Matrix& B) {
  return kernels::active().max_abs_diff(A.data(), B.data(),
                                        A.dim() * A.dim());
}

Vec normalized(Vec v) {
  const double m = inf_norm(v);
  if (m > 0.0) kernels::active().scale(1.0 / m, v.data(), v.size());
  return v;
}

Vec add(const Vec& a, const Vec& b) {
  Vec r(a);
  kernels::active().axpy(1.0, b.data(), r.data(), r.size());
  return r;
}

Vec sub(const Vec& a, const Vec& b) {
  Vec r(a);
  kernels::active().axpy(-1.0, b.data(), r.data(), r.size());
  return r;
}

Vec scaled(Vec v, double alpha) {
  kernels::active().scale(alpha, v.data(), v.size());
  return v;
}

void axpy_into(Vec& y, double alpha, const Vec& x) {
  kernels::active().axpy(alpha, x.data(), y.data(), y.size());
}

Matrix submatrix(const Matrix& A, std::span<const int> rows,
                 std::span<const int> cols) {
  Matrix S(rows.size() == cols.size() ? rows.size() : 0);
  if (rows.size() != cols.size())
    throw std::invalid_argument("submatrix must be square");
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      S(i, j) = A(static_cast<std::size_t>(rows[i]),
                  static_cast<std::size_t>(cols[j]));
  return S;
}

Vec gather(const Vec& v, std::span<const int> idx) {
  Vec r(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i)
    r[i] = v[static_cast<std::size_t>(idx[i])];
  return r;
}

void scatter(Vec& dst, std::span<const int> idx, const Vec& src) {
  for (std::size_t i = 0; i < idx.size(); ++i)
    dst[static_cast<std::size_t>(idx[i])] = src[i];
}

std::optional<Vec> lu_solve(Matrix A, Vec b, double rel_tol) {
  const std::size_t n = A.dim();
  if (b.size() != n) throw std::invalid_argument("lu_solve dimensions");
  const double floor = rel_tol * std::max(max_abs(A), 1e-300);

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(A(r, col)) > std::fabs(A(piv, col))) piv = r;
    if (std::fabs(A(piv, col)) <= floor) return std::nullopt;
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(A(col, j), A(piv, j));
      std::swap(b[col], b[piv]);
    }
    const double inv = 1.0 / A(col, col);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = A(r, col) * inv;
      if (f == 0.0) continue;
      A(r, col) = 0.0;
      for (std::size_t j = col + 1; j < n; ++j) A(r, j) -= f * A(col, j);
      b[r] -= f * b[col];
    }
  }
  Vec x(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= A(i, j) * x[j];
    x[i] = s / A(i, i);
  }
  return x;
}

}  // namespace matgrowth
