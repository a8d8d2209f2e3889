#pragma once

#include <cstddef>
#include <span>

#include "matgrowth/matrix.hpp"

namespace matgrowth {

inline constexpr double kDefaultSprTol = 1e-9;
inline constexpr double kPerronTol = 1e-12;
inline constexpr std::size_t kPowerIterationCap = 1'000'000;

struct PerronResult {
  double value;           // spectral radius of the block
  Vec vector;             // strictly positive, infinity norm 1
  std::size_t iterations;
};

/// Perron pair of the irreducible block A|_(states,states).
///
/// Power iteration on the primitivity shift A|_C + I removes periodicity;
/// convergence is certified by the Collatz-Wielandt enclosure
/// min_i (Bx)_i/x_i <= spr(B) <= max_i (Bx)_i/x_i, stopping once the
/// enclosure width drops below eps relative to the estimate. The caller is
/// responsible for `states` actually being one class (a maximal strongly
/// connected subset); a singleton is resolved exactly.
PerronResult irreducible_perron(const Matrix& A, std::span<const int> states,
                                double eps = kPerronTol,
                                std::size_t cap = kPowerIterationCap);

}  // namespace matgrowth
