#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "matgrowth/matrix.hpp"
#include "matgrowth/perron.hpp"

namespace matgrowth {

enum class Mode { Min, Max };
enum class Strategy { Auto, Brute, Recursive };

inline constexpr std::uint64_t kDefaultClosureCap = 4096;
inline constexpr double kTieTol = 1e-12;  // scaled by the norm of v

/// Finite family of nonnegative matrices given as per-row candidate sets.
/// The encoded set K (all matrices assembled by picking one candidate per
/// row) satisfies the product property by construction; min/max over K
/// equals min/max over the generating matrices, so K itself is only ever
/// materialized by enumerate_closure.
struct RowChoiceFamily {
  int n = 0;
  std::vector<std::vector<Vec>> rows;  // rows[i]: nonempty, deduplicated

  std::uint64_t closure_size() const;  // saturates at uint64 max
};

/// One choice index per row; names a single matrix of the closure.
struct Policy {
  std::vector<int> choice;
  bool operator==(const Policy&) const = default;
};

/// Rows are deduplicated by exact equality of parsed values.
/// Dimension mismatch raises PreconditionError.
RowChoiceFamily family_from_matrices(const std::vector<Matrix>& mats);

Matrix assemble(const RowChoiceFamily& F, const Policy& p);

/// f_K(v) (Mode::Min) or g_K(v) (Mode::Max): per-row optimum of row . v.
Vec apply(const RowChoiceFamily& F, const Vec& v, Mode mode);

/// A policy achieving apply(F, v, mode) in every row. Ties (within kTieTol
/// scaled by |v|_inf) are resolved in favor of the incumbent's choice where
/// it achieves the optimum, else the lowest index.
Policy select_policy(const RowChoiceFamily& F, const Vec& v, Mode mode,
                     const Policy* incumbent = nullptr);

/// Visit every matrix of the closure exactly once, in deterministic
/// mixed-radix order. Raises CapExceededError (carrying the size) when the
/// closure exceeds cap.
void for_each_closure(const RowChoiceFamily& F, std::uint64_t cap,
                      const std::function<void(const Policy&, const Matrix&)>& f);

/// Materialized closure, subject to the same cap.
std::vector<std::pair<Policy, Matrix>> enumerate_closure(
    const RowChoiceFamily& F, std::uint64_t cap = kDefaultClosureCap);

struct ExtremalResult {
  Policy policy;
  Matrix matrix;
  std::vector<GrowthDescriptor> descriptors;  // per state, clustered betas
  double lambda = 0.0;                        // spr of the extremal matrix
};

/// A <=-minimal (Mode::Min) or <=-maximal (Mode::Max) matrix of the closure:
/// its per-state growth descriptor vector is componentwise least (greatest).
///
/// Strategy::Brute enumerates the closure and picks a matrix matching the
/// componentwise envelope (one exists by theory); Strategy::Recursive runs
/// the merge construction (greedy multi-start candidate search, merge of
/// optimal-growth state sets, recursion on the complement). Auto uses brute
/// up to the cap. A nilpotent extremal matrix raises UnsupportedError.
ExtremalResult extremal_matrix(const RowChoiceFamily& F, Mode mode,
                               Strategy strategy = Strategy::Auto,
                               std::uint64_t cap = kDefaultClosureCap,
                               double eps_spr = kDefaultSprTol);

struct MinimalPartition {
  std::vector<std::vector<int>> partition;  // {S_0, ..., S_nu}
  double lambda = 0.0;
  int degree = 0;
};

/// Principal partition, spectral radius and degree shared by all
/// <=-minimal matrices of the closure.
MinimalPartition minimal_partition(const RowChoiceFamily& F,
                                   Strategy strategy = Strategy::Auto,
                                   std::uint64_t cap = kDefaultClosureCap,
                                   double eps_spr = kDefaultSprTol);

}  // namespace matgrowth
