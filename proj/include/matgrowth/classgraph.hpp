#pragma once

#include <span>
#include <utility>
#include <vector>

#include "matgrowth/matrix.hpp"
#include "matgrowth/power_iteration.hpp"

namespace matgrowth {

/// Combinatorial structure of a nonnegative matrix: its classes (maximal
/// irreducible subsets = strongly connected components of the positivity
/// digraph i -> j iff a_ij > 0) and the access DAG between them.
///
/// Classes are listed in topological order: if class c has access to class d
/// then c < d, so permuting states by class order puts the matrix in block
/// upper-triangular (Frobenius normal) form.
struct ClassGraph {
  std::vector<std::vector<int>> classes;      // sorted state lists
  std::vector<int> class_of;                  // state -> class index
  std::vector<std::pair<int, int>> edges;     // direct edges c -> d, c != d
  std::vector<std::vector<int>> adj;          // adjacency by class index
  std::vector<std::vector<char>> reach;       // reach[c][d]: access (refl.)

  int size() const { return static_cast<int>(classes.size()); }
  bool accesses(int c, int d) const { return reach[c][d] != 0; }
};

/// Positivity threshold is exact: an entry participates in the digraph iff
/// it is > 0. The zero pattern of parsed input is structural data.
ClassGraph classes(const Matrix& A);

/// Full class structure: per-class spectral radii, basic/final flags,
/// depths, the degree nu and the principal partition {S_0, ..., S_nu}.
struct ClassStructure {
  ClassGraph graph;
  std::vector<double> class_spr;
  std::vector<char> is_basic;
  std::vector<char> is_final;
  std::vector<int> depth;                        // per class
  int degree = 0;                                // nu
  std::vector<std::vector<int>> principal_partition;  // index = depth; S_0 may be empty
  double spectral_radius = 0.0;                  // max class spr
};

/// eps_spr is the single point where numerics meets structure: a class is
/// basic iff |spr(C) - spr(A)| <= eps_spr * spr(A). Classes of spectral
/// radius 0 (nilpotent singletons) are supported throughout.
ClassStructure classify(const Matrix& A, double eps_spr = kDefaultSprTol);

/// Period of one class (gcd of within-class cycle lengths), used to average
/// matrix powers over a full period. Computed from BFS levels.
int class_period(const Matrix& A, std::span<const int> cls);

}  // namespace matgrowth
