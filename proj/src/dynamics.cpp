#include "matgrowth/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "matgrowth/errors.hpp"

namespace matgrowth {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double IterationTrace::log_magnitude(int m, int i) const {
  const double x = vectors[static_cast<std::size_t>(m)]
                          [static_cast<std::size_t>(i)];
  if (x <= 0.0) return kNegInf;
  return std::log(x) + log_scale[static_cast<std::size_t>(m)];
}

int IterationTrace::collapse_step(int i) const {
  const int len = static_cast<int>(vectors.size());
  int first = -1;
  for (int m = len - 1; m >= 0; --m) {
    if (vectors[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)] >
        0.0)
      break;
    first = m;
  }
  return first;
}

IterationTrace iterate(const std::function<Vec(const Vec&)>& op,
                       const Vec& v0, int steps) {
  for (double x : v0)
    if (!(x > 0.0))
      throw PreconditionError("iterate: start vector must be > 0");

  IterationTrace tr;
  tr.vectors.reserve(static_cast<std::size_t>(steps) + 1);
  tr.log_scale.reserve(static_cast<std::size_t>(steps) + 1);

  Vec x = v0;
  double ls = 0.0;
  double m = inf_norm(x);
  ls += std::log(m);
  x = scaled(std::move(x), 1.0 / m);
  tr.vectors.push_back(x);
  tr.log_scale.push_back(ls);

  for (int n = 0; n < steps; ++n) {
    Vec y = op(x);
    const double scale = std::max(inf_norm(y), 1e-300);
    for (double& c : y) {
      if (c < 0.0) {
        if (c > -1e-12 * scale) {
          c = 0.0;  // rounding dust from an otherwise nonnegative operator
        } else {
          throw NumericError(
              "iterate: operator produced a negative component (contract "
              "violation)");
        }
      }
    }
    m = inf_norm(y);
    if (m > 0.0) {
      ls += std::log(m);
      y = scaled(std::move(y), 1.0 / m);
    }
    // m == 0: the whole vector collapsed; store it untouched
    tr.vectors.push_back(y);
    tr.log_scale.push_back(ls);
    x = std::move(y);
  }
  return tr;
}

GrowthEstimate estimate_growth(const IterationTrace& trace, int state,
                               double burn_in) {
  GrowthEstimate est;
  const int len = trace.steps() + 1;

  // A component that is truly eventually zero dies within dim steps (the
  // nilpotent part of the reachable set has depth at most dim). Exact zeros
  // appearing later are relative underflow of an exponentially slower
  // component, handled below by fitting the positive window before them.
  const int dim = static_cast<int>(trace.vectors.front().size());
  const int collapse = trace.collapse_step(state);
  if (collapse >= 0 && collapse <= std::min(std::max(dim + 1, 32), len / 4)) {
    est.collapsed = true;
    est.beta = 0.0;
    est.k = 1;
    return est;
  }

  // Longest trailing window of strictly positive values (relative underflow
  // truncates slow components late in the trace).
  int hi = len - 1;
  while (hi >= 0 && trace.vectors[static_cast<std::size_t>(hi)]
                            [static_cast<std::size_t>(state)] <= 0.0)
    --hi;
  int lo = hi;
  while (lo > 0 && trace.vectors[static_cast<std::size_t>(lo - 1)]
                           [static_cast<std::size_t>(state)] > 0.0)
    --lo;
  lo = std::max(lo, 1);  // log n regressor needs n >= 1

  const int begin = lo + static_cast<int>(burn_in * (hi - lo));
  est.window_begin = begin;
  est.window_end = hi;
  const int count = hi - begin + 1;
  if (count < 200) est.low_confidence = true;
  if (count < 8) {
    est.beta = 0.0;
    est.k = 1;
    est.low_confidence = true;
    return est;
  }

  // Median of successive log differences (raw exponent estimate).
  {
    std::vector<double> diffs;
    diffs.reserve(static_cast<std::size_t>(count));
    for (int n = begin; n < hi; ++n)
      diffs.push_back(trace.log_magnitude(n + 1, state) -
                      trace.log_magnitude(n, state));
    if (diffs.size() % 2 == 1) diffs.pop_back();  // keep period-2 pairs whole
    std::sort(diffs.begin(), diffs.end());
    const std::size_t h = diffs.size() / 2;
    est.beta_raw = std::exp(0.5 * (diffs[h - 1] + diffs[h]));
  }

  // Least squares of L_n against (1, n, log n): the n coefficient gives
  // log beta, the log n coefficient gives k - 1. Regressors are centered
  // for conditioning.
  double mean_n = 0.0, mean_g = 0.0, mean_l = 0.0;
  for (int n = begin; n <= hi; ++n) {
    mean_n += n;
    mean_g += std::log(static_cast<double>(n));
    mean_l += trace.log_magnitude(n, state);
  }
  mean_n /= count;
  mean_g /= count;
  mean_l /= count;

  double snn = 0.0, sng = 0.0, sgg = 0.0, snl = 0.0, sgl = 0.0;
  for (int n = begin; n <= hi; ++n) {
    const double dn = n - mean_n;
    const double dg = std::log(static_cast<double>(n)) - mean_g;
    const double dl = trace.log_magnitude(n, state) - mean_l;
    snn += dn * dn;
    sng += dn * dg;
    sgg += dg * dg;
    snl += dn * dl;
    sgl += dg * dl;
  }
  const double det = snn * sgg - sng * sng;
  if (det <= 0.0 || !std::isfinite(det)) {
    est.beta = est.beta_raw;
    est.k = 1;
    est.low_confidence = true;
    return est;
  }
  const double b = (snl * sgg - sgl * sng) / det;   // log beta
  const double c = (sgl * snn - snl * sng) / det;   // k - 1

  est.beta = std::exp(b);
  est.slope = c;
  est.k = 1 + static_cast<int>(std::lround(c));
  if (std::fabs(c - std::lround(c)) > 0.25) est.low_confidence = true;
  if (est.k < 1) {
    est.k = 1;
    est.low_confidence = true;
  }

  double ss = 0.0;
  for (int n = begin; n <= hi; ++n) {
    const double dn = n - mean_n;
    const double dg = std::log(static_cast<double>(n)) - mean_g;
    const double r = (trace.log_magnitude(n, state) - mean_l) - b * dn - c * dg;
    ss += r * r;
  }
  est.fit_residual = std::sqrt(ss / count);
  return est;
}

bool compare_growth(const GrowthDescriptor& predicted,
                    const GrowthEstimate& estimated, double tol_beta,
                    bool require_k) {
  if (predicted.beta == 0.0) return estimated.collapsed;
  if (estimated.collapsed) return false;
  const double denom = std::max(predicted.beta, estimated.beta);
  if (std::fabs(predicted.beta - estimated.beta) > tol_beta * denom)
    return false;
  return !require_k || predicted.k == estimated.k;
}

}  // namespace matgrowth
