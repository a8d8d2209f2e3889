#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "matgrowth/classgraph.hpp"
#include "matgrowth/matrix.hpp"

namespace matgrowth {

inline constexpr double kDefaultResidualTol = 1e-8;
inline constexpr std::size_t kCesaroCap = 1'000'000;

// Sign-pattern thresholds, relative to the vector scale: magnitudes below
// kZeroFloor count as zero, above kPositiveFloor as positive; the gap in
// between is ambiguous and treated as a failure by the checkers.
inline constexpr double kZeroFloor = 1e-12;
inline constexpr double kPositiveFloor = 1e-9;

/// The statement "component ~ n^(k-1) beta^n".
struct GrowthDescriptor {
  double beta = 0.0;
  int k = 1;
  bool operator==(const GrowthDescriptor&) const = default;
};

inline bool approx_equal(double a, double b, double eps) {
  return std::fabs(a - b) <= eps * std::max({std::fabs(a), std::fabs(b)});
}

/// Lexicographic on (beta, k); beta compared within relative eps_spr.
int compare(const GrowthDescriptor& a, const GrowthDescriptor& b,
            double eps_spr = kDefaultSprTol);

/// Merges nonnegative values whose relative gap is within eps and maps each
/// to its cluster maximum, so "equal beta" is one consistent equivalence
/// relation across a whole set of matrices.
class SprClusters {
 public:
  SprClusters() = default;
  SprClusters(std::vector<double> values, double eps = kDefaultSprTol);
  double representative(double value) const;

 private:
  std::vector<double> lowers_;  // sorted cluster minima
  std::vector<double> uppers_;  // sorted cluster maxima
  double eps_ = kDefaultSprTol;
};

struct PositiveEigenpair {
  double lambda = 0.0;
  Vec v;  // strictly positive, infinity norm 1
};

/// Generalized eigenvector chain v^(1)..v^(nu) with its eigenvalue and the
/// principal partition its sign pattern refers to.
struct EigenChain {
  double lambda = 0.0;
  std::vector<Vec> vectors;                    // vectors[i-1] = v^(i)
  std::vector<std::vector<int>> partition;     // {S_0, ..., S_nu}
};

/// spr(A), computed per irreducible class (power iteration on the
/// primitivity shift A|_C + I) and maximized over classes.
double spectral_radius(const Matrix& A, double eps = kPerronTol);

/// Strictly positive eigenvector of an irreducible matrix, infinity norm 1.
/// Throws PreconditionError when A is reducible.
Vec perron_vector(const Matrix& A, double eps = kPerronTol);

/// The strictly positive eigenpair of A, which exists iff the basic classes
/// of A are exactly its final classes; absence is a normal result. Built
/// from per-final-class Perron vectors extended through the transient states
/// by u|_S2 = (lambda I - A|_(S2,S2))^(-1) A|_(S2,S1) u|_S1.
std::optional<PositiveEigenpair> positive_eigenvector_single(
    const Matrix& A, double eps_spr = kDefaultSprTol);

/// u|_s2 from the extension formula above; near-singular shifted block
/// (which theory excludes) raises NumericError.
Vec extend_through_transient(const Matrix& A, const std::vector<int>& s2,
                             const std::vector<int>& s1, const Vec& u_s1,
                             double lambda);

/// Dual matrix A* = lim (n+1)^(-1) sum_{i<=n} lambda^(-i) A^i, satisfying
/// AA* = A*A = lambda A* and (A*)^2 = A*. Requires a strictly positive
/// eigenvector. Averaging runs over a full period of the basic classes per
/// window, which turns the O(1/n) plain Cesaro tail into a geometric one.
Matrix dual_matrix(const Matrix& A, double eps = kDefaultResidualTol,
                   std::size_t cap = kCesaroCap);

/// Solve (lambda I - A + A*) x = b; the system is nonsingular whenever
/// A* is the dual matrix of A.
Vec fundamental_solve(const Matrix& A, const Matrix& Astar, double lambda,
                      const Vec& b);

/// Rothblum chain: A v^(nu) = lambda v^(nu), A v^(i) = lambda v^(i) + v^(i+1),
/// with v^(i) strictly positive exactly on S_i u ... u S_nu. Requires
/// spr(A) > 0 (nilpotent input raises UnsupportedError).
EigenChain rothblum_chain(const Matrix& A, double eps_spr = kDefaultSprTol);

/// Per-state growth of A^n v for strictly positive v: beta is the largest
/// class spectral radius accessible from the state's class; k the maximal
/// count of beta-classes along access chains starting there. A state whose
/// reachable set is nilpotent gets (0,1), meaning eventually zero.
std::vector<GrowthDescriptor> growth_descriptors(
    const ClassStructure& cs, const SprClusters& clusters);
std::vector<GrowthDescriptor> growth_descriptors(
    const Matrix& A, double eps_spr = kDefaultSprTol);
GrowthDescriptor growth_descriptor(const Matrix& A, int state,
                                   double eps_spr = kDefaultSprTol);

/// Growth of sum_{i<n} lambda^(n-i) (i^(k-1) beta^i): keeps d when
/// beta > lambda, bumps k when beta = lambda, and degrades to (lambda, 1)
/// when beta < lambda (dominated geometric series).
GrowthDescriptor combine_growth(double lambda, GrowthDescriptor d,
                                double eps_spr = kDefaultSprTol);

/// Empty when every vectors[i-1] is zero (< kZeroFloor * scale) on
/// S_0..S_(i-1) and positive (> kPositiveFloor * scale) on S_i..S_nu;
/// otherwise a description of the first violation. Magnitudes between the
/// two thresholds are ambiguous and reported as violations.
std::optional<std::string> sign_pattern_violation(const EigenChain& chain);

/// alpha-shift v^(i) += alpha v^(i+1) (top vector unchanged); preserves the
/// chain equations for any alpha.
void alpha_shift(std::vector<Vec>& chain, double alpha);

}  // namespace matgrowth
