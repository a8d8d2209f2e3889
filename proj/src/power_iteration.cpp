#include "matgrowth/power_iteration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "matgrowth/errors.hpp"

namespace matgrowth {

PerronResult irreducible_perron(const Matrix& A, std::span<const int> states,
                                double eps, std::size_t cap) {
  const std::size_t m = states.size();
  if (m == 0) throw PreconditionError("irreducible_perron: empty state set");
  if (m == 1) {
    const int s = states[0];
    return {A(static_cast<std::size_t>(s), static_cast<std::size_t>(s)),
            Vec{1.0}, 0};
  }

  Matrix B = submatrix(A, states, states);
  for (std::size_t i = 0; i < m; ++i) B(i, i) += 1.0;  // primitivity shift

  Vec x(m, 1.0);
  double lo = 0.0, hi = std::numeric_limits<double>::infinity();
  for (std::size_t it = 1; it <= cap; ++it) {
    Vec y = matvec(B, x);
    lo = std::numeric_limits<double>::infinity();
    hi = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double r = y[i] / x[i];  // x stays > 0: B >= I so y >= x
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    x = normalized(std::move(y));
    if (hi - lo <= eps * std::max(lo - 1.0, 1e-12)) {
      return {0.5 * (lo + hi) - 1.0, std::move(x), it};
    }
  }
  throw ConvergenceError("power iteration did not converge within cap",
                         0.5 * (lo + hi) - 1.0);
}

}  // namespace matgrowth
