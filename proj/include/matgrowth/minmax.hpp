#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "matgrowth/family.hpp"
#include "matgrowth/matrix.hpp"
#include "matgrowth/perron.hpp"

namespace matgrowth {

/// Solution of the nested functional equations
///   min_{A in K}   A v^(t)                    = lambda v^(t)
///   min_{A in K_i} A v^(i-1) + r_(i-1)(A)     = lambda v^(i-1) + v^(i)
/// together with the final optimal policy and the shrinking admissible sets
/// K_t >= K_(t-1) >= ... given per row: shrinking_sets[l][row] lists the
/// choice indices admissible at level t-l.
struct NestedSolution {
  int t = 1;
  std::vector<Vec> vectors;  // vectors[i-1] = v^(i)
  Policy policy;
  std::vector<std::vector<std::vector<int>>> shrinking_sets;
};

/// Row-local right-hand sides: component `row` of r_level(A) may depend
/// only on A's choice in that row, which is exactly what extends the
/// product property to the tuples (A, r_1(A), ..., r_(t-1)(A)).
using RowLocalR = std::function<double(int level, int row, int choice)>;

struct Characterization {
  bool has_positive_eigenvector = false;  // (a) computed via policy iteration
  bool structure_test = false;            // (b) basic = final on a <=-minimal
  bool all_growth_lambda = false;         // (c) every descriptor = (lambda,1)
  bool uniform_growth = false;            // (d) all descriptors equal
  bool consistent = false;                // the four agree
};

/// Strictly positive eigenvector of f_K, which exists iff the <=-minimal
/// matrices admit one (their basic classes are exactly their final classes).
/// Policy iteration from a <=-minimal matrix and its eigenvector; the
/// eigenvector update solves the transient block against the values on the
/// final classes. Absence is a normal result.
std::optional<PositiveEigenpair> positive_eigenvector_min(
    const RowChoiceFamily& F, Strategy strategy = Strategy::Auto,
    std::uint64_t cap = kDefaultClosureCap, double eps_spr = kDefaultSprTol,
    double eps_res = kDefaultResidualTol);

struct IrreducibleEigenpair {
  double lambda = 0.0;  // min_{A in K} spr(A)
  Vec v;
  bool unique = false;  // re-solved from another start and compared
};

/// Eigenpair of f_K when every matrix of the closure is irreducible.
/// The precondition is checked by enumerating the closure when it fits the
/// cap, else conservatively (all choices of a row must share one zero
/// pattern, and that pattern must be irreducible).
IrreducibleEigenpair irreducible_eigenvector_min(
    const RowChoiceFamily& F, std::uint64_t cap = kDefaultClosureCap,
    double eps_spr = kDefaultSprTol, double eps_res = kDefaultResidualTol);

/// Unique solution of B v^(i) + r_i(B) = lambda v^(i) + v^(i+1) (top
/// equation homogeneous) with side condition B* v^(1) = 0:
///   v^(t) = B* r_(t-1),
///   v^(i) = (lambda I - B + B*)^(-1) [r_i + B* r_(i-1) - v^(i+1)],
///   v^(1) = (lambda I - B + B*)^(-1) [r_1 - v^(2)].
/// r holds r_1..r_(t-1); empty r gives the degenerate t = 1 solution {0}.
std::vector<Vec> solve_nested_linear(const Matrix& B, double lambda,
                                     const Matrix& Bstar,
                                     const std::vector<Vec>& r);

/// Howard-style iteration for the nested equations: solve for the incumbent,
/// improve lexicographically through the equations (incumbent-preferring
/// ties), stop at a fixed point. Requires a <=-minimal matrix with strictly
/// positive eigenvector and B* r_(t-1)(B) > 0 (validated at start).
NestedSolution nested_policy_iteration(const RowChoiceFamily& F, int t,
                                       const RowLocalR& r,
                                       Strategy strategy = Strategy::Auto,
                                       std::uint64_t cap = kDefaultClosureCap,
                                       double eps_spr = kDefaultSprTol,
                                       double eps_res = kDefaultResidualTol);

/// Generalized eigenvector chain of f_K: nonnegative v^(1)..v^(nu) with
///   min_{A in K} A v^(nu) = lambda v^(nu),
///   min_{A in K} A v^(i)  = lambda v^(i) + v^(i+1),
/// positive exactly on S_i u ... u S_nu of the principal <=-minimal
/// partition. Built by recursion over the partition: the sub-family keeping
/// zero rows into S_nu yields the lower levels, the S_nu coordinates come
/// from nested_policy_iteration, and alpha-shifts restore nonnegativity and
/// promote the shrinking-set minima to minima over the full family.
EigenChain generalized_chain_min(const RowChoiceFamily& F,
                                 Strategy strategy = Strategy::Auto,
                                 std::uint64_t cap = kDefaultClosureCap,
                                 double eps_spr = kDefaultSprTol,
                                 double eps_res = kDefaultResidualTol);

/// Growth descriptor of (f_K^n v)_state (Mode::Min) or (g_K^n v)_state
/// (Mode::Max): equals the descriptor of a <=-extremal matrix of that mode.
GrowthDescriptor growth(const RowChoiceFamily& F, Mode mode, int state,
                        Strategy strategy = Strategy::Auto,
                        std::uint64_t cap = kDefaultClosureCap,
                        double eps_spr = kDefaultSprTol);

/// The four equivalent conditions for f_K to have a strictly positive
/// eigenvector, each computed independently, plus their agreement flag.
Characterization characterize(const RowChoiceFamily& F,
                              Strategy strategy = Strategy::Auto,
                              std::uint64_t cap = kDefaultClosureCap,
                              double eps_spr = kDefaultSprTol,
                              double eps_res = kDefaultResidualTol);

}  // namespace matgrowth
