#pragma once

#include <functional>
#include <vector>

#include "matgrowth/matrix.hpp"
#include "matgrowth/perron.hpp"

namespace matgrowth {

/// Overflow-safe record of h^n(v): each stored vector is rescaled to
/// infinity norm 1 and the accumulated log of the rescaling factors is kept
/// alongside, so log((h^n v)_i) = log(vectors[n][i]) + log_scale[n].
struct IterationTrace {
  std::vector<Vec> vectors;        // size steps+1, each with inf-norm <= 1
  std::vector<double> log_scale;   // size steps+1

  int steps() const { return static_cast<int>(vectors.size()) - 1; }

  /// log-magnitude of component i at step m; -inf once the component is 0.
  double log_magnitude(int m, int i) const;

  /// First step at which the component is exactly zero and stays zero
  /// through the end of the trace, or -1 if it does not end at zero.
  int collapse_step(int i) const;
};

/// Iterate a homogeneous nondecreasing operator from a strictly positive
/// start vector. An operator output with a negative component violates the
/// contract and raises NumericError.
IterationTrace iterate(const std::function<Vec(const Vec&)>& op,
                       const Vec& v0, int steps);

struct GrowthEstimate {
  double beta = 0.0;
  int k = 1;
  bool collapsed = false;        // verdict "eventually zero"
  bool low_confidence = false;
  double beta_raw = 0.0;         // median-of-differences pre-estimate
  double slope = 0.0;            // fitted log n coefficient (k = 1 + round)
  double fit_residual = 0.0;     // RMS residual of the fit
  int window_begin = 0;
  int window_end = 0;
};

/// Estimate (beta, k) with component ~ n^(k-1) beta^n from a trace.
///
/// The log-magnitude series is fit over the post-burn-in window by least
/// squares against (1, n, log n); beta = exp(n-coefficient), k = 1 +
/// round(log n coefficient). The median of successive log differences is
/// reported as beta_raw. Components that collapse to exact zero early get
/// the verdict (0,1); components whose rescaled values underflow late (true
/// growth slower than the dominant one by an exponential factor) are fit
/// over their longest trailing positive window instead.
GrowthEstimate estimate_growth(const IterationTrace& trace, int state,
                               double burn_in = 0.25);

/// Pass iff |beta_hat - beta| / max(beta, beta_hat) <= tol_beta and, when
/// require_k, k matches exactly. An eventually-zero prediction (beta = 0)
/// requires the collapsed verdict.
bool compare_growth(const GrowthDescriptor& predicted,
                    const GrowthEstimate& estimated, double tol_beta,
                    bool require_k);

}  // namespace matgrowth
