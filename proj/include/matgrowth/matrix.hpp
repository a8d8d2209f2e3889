#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace matgrowth {

using Vec = std::vector<double>;

/// Dense square row-major matrix. Entries may be negative (used for shifted
/// systems like lambda*I - A); nonnegativity is a contract of the call sites
/// that need it, checked via nonnegative().
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}
  Matrix(std::size_t n, std::vector<double> data);

  static Matrix identity(std::size_t n);

  std::size_t dim() const { return n_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * n_ + j];
  }

  std::span<double> row(std::size_t i) { return {data_.data() + i * n_, n_}; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * n_, n_};
  }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  bool nonnegative() const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

Vec matvec(const Matrix& A, const Vec& x);
Matrix matmul(const Matrix& A, const Matrix& B);

double dot(std::span<const double> a, std::span<const double> b);
double inf_norm(const Vec& v);
double max_abs(const Matrix& A);           // max |a_ij|
double max_abs_diff(const Vec& a, const Vec& b);
double max_abs_diff(const Matrix& A, const Matrix& B);

/// v scaled to infinity norm 1; zero vector returned unchanged.
Vec normalized(Vec v);

Vec add(const Vec& a, const Vec& b);
Vec sub(const Vec& a, const Vec& b);
Vec scaled(Vec v, double alpha);
/// y += alpha * x
void axpy_into(Vec& y, double alpha, const Vec& x);

Matrix submatrix(const Matrix& A, std::span<const int> rows,
                 std::span<const int> cols);
Vec gather(const Vec& v, std::span<const int> idx);
void scatter(Vec& dst, std::span<const int> idx, const Vec& src);

/// Solve A x = b by LU with partial pivoting. Returns nullopt when a pivot
/// falls below rel_tol * max|A| (numerically singular).
std::optional<Vec> lu_solve(Matrix A, Vec b, double rel_tol = 1e-13);

}  // namespace matgrowth
