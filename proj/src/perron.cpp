#include "matgrowth/perron.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "matgrowth/errors.hpp"

namespace matgrowth {

int compare(const GrowthDescriptor& a, const GrowthDescriptor& b,
            double eps_spr) {
  if (!approx_equal(a.beta, b.beta, eps_spr))
    return a.beta < b.beta ? -1 : 1;
  if (a.k != b.k) return a.k < b.k ? -1 : 1;
  return 0;
}

SprClusters::SprClusters(std::vector<double> values, double eps) : eps_(eps) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  for (double v : values) {
    if (!uppers_.empty() && approx_equal(uppers_.back(), v, eps_)) {
      uppers_.back() = v;  // chain-merge; representative is the cluster max
    } else {
      lowers_.push_back(v);
      uppers_.push_back(v);
    }
  }
}

double SprClusters::representative(double value) const {
  const auto it = std::lower_bound(uppers_.begin(), uppers_.end(), value);
  const std::size_t idx = static_cast<std::size_t>(it - uppers_.begin());
  if (idx < uppers_.size() &&
      (value >= lowers_[idx] || approx_equal(value, lowers_[idx], eps_)))
    return uppers_[idx];
  if (idx > 0 && approx_equal(uppers_[idx - 1], value, eps_))
    return uppers_[idx - 1];
  throw NumericError("SprClusters: value not covered by any cluster");
}

double spectral_radius(const Matrix& A, double eps) {
  const ClassGraph cg = classes(A);
  double spr = 0.0;
  for (const auto& cls : cg.classes)
    spr = std::max(spr, irreducible_perron(A, cls, eps).value);
  return spr;
}

Vec perron_vector(const Matrix& A, double eps) {
  const ClassGraph cg = classes(A);
  if (cg.size() != 1)
    throw PreconditionError("perron_vector: matrix is reducible");
  return irreducible_perron(A, cg.classes[0], eps).vector;
}

Vec extend_through_transient(const Matrix& A, const std::vector<int>& s2,
                             const std::vector<int>& s1, const Vec& u_s1,
                             double lambda) {
  Matrix M = submatrix(A, s2, s2);
  for (std::size_t i = 0; i < M.dim(); ++i) {
    for (std::size_t j = 0; j < M.dim(); ++j) M(i, j) = -M(i, j);
    M(i, i) += lambda;
  }
  Vec rhs(s2.size(), 0.0);
  for (std::size_t i = 0; i < s2.size(); ++i)
    for (std::size_t j = 0; j < s1.size(); ++j)
      rhs[i] += A(static_cast<std::size_t>(s2[i]),
                  static_cast<std::size_t>(s1[j])) *
                u_s1[j];
  auto x = lu_solve(std::move(M), std::move(rhs), 1e-10);
  if (!x)
    throw NumericError(
        "transient block lambda*I - A22 is numerically singular; "
        "spr(A22) < lambda is guaranteed by theory, so this indicates a "
        "basic-class misclassification (check tol-spr)");
  return *x;
}

std::optional<PositiveEigenpair> positive_eigenvector_single(const Matrix& A,
                                                             double eps_spr) {
  const ClassStructure cs = classify(A, eps_spr);
  const int m = cs.graph.size();
  for (int c = 0; c < m; ++c)
    if (cs.is_basic[c] != cs.is_final[c]) return std::nullopt;

  const double lambda = cs.spectral_radius;
  const std::size_t n = A.dim();
  Vec v(n, 0.0);
  std::vector<int> s1, s2;
  for (int c = 0; c < m; ++c) {
    if (cs.is_final[c]) {
      scatter(v, cs.graph.classes[c],
              irreducible_perron(A, cs.graph.classes[c]).vector);
      s1.insert(s1.end(), cs.graph.classes[c].begin(),
                cs.graph.classes[c].end());
    } else {
      s2.insert(s2.end(), cs.graph.classes[c].begin(),
                cs.graph.classes[c].end());
    }
  }
  if (!s2.empty()) {
    std::sort(s1.begin(), s1.end());
    std::sort(s2.begin(), s2.end());
    scatter(v, s2, extend_through_transient(A, s2, s1, gather(v, s1), lambda));
  }
  return PositiveEigenpair{lambda, normalized(std::move(v))};
}

Matrix dual_matrix(const Matrix& A, double eps, std::size_t cap) {
  const auto pe = positive_eigenvector_single(A);
  if (!pe)
    throw PreconditionError(
        "dual_matrix: A has no strictly positive eigenvector");
  const double lambda = pe->lambda;
  if (lambda <= 0.0)
    throw UnsupportedError("dual_matrix: nilpotent matrix (lambda = 0)");

  const ClassStructure cs = classify(A);
  long long period = 1;
  for (int c = 0; c < cs.graph.size(); ++c)
    if (cs.is_basic[c])
      period = std::lcm(period,
                        (long long)class_period(A, cs.graph.classes[c]));
  if (period > 10000)
    throw NumericError("dual_matrix: combined class period too large");
  const std::size_t p = static_cast<std::size_t>(period);

  const std::size_t n = A.dim();
  Matrix B = A;
  kernels::active().scale(1.0 / lambda, B.data(), n * n);

  // Window average W_m = (1/p) sum_{k=m}^{m+p-1} (A/lambda)^k. Peripheral
  // eigenvalue contributions cancel exactly over a full period, so
  // W_m -> A* geometrically instead of the O(1/m) plain Cesaro rate.
  std::vector<Matrix> ring;
  ring.reserve(p);
  Matrix cur = Matrix::identity(n);
  Matrix sum(n);
  for (std::size_t k = 0; k < p; ++k) {
    ring.push_back(cur);
    kernels::active().axpy(1.0, cur.data(), sum.data(), n * n);
    if (k + 1 < p) cur = matmul(cur, B);
  }

  auto window_avg = [&](const Matrix& s) {
    Matrix w = s;
    kernels::active().scale(1.0 / static_cast<double>(p), w.data(), n * n);
    for (std::size_t i = 0; i < n * n; ++i)
      w.data()[i] = std::max(w.data()[i], 0.0);
    return w;
  };

  Matrix prev = window_avg(sum);
  std::size_t head = 0;
  double last_diff = 0.0;
  for (std::size_t m = 1; m <= cap; ++m) {
    cur = matmul(cur, B);
    kernels::active().axpy(-1.0, ring[head].data(), sum.data(), n * n);
    kernels::active().axpy(1.0, cur.data(), sum.data(), n * n);
    ring[head] = cur;
    head = (head + 1) % p;
    if (m % 64 == 0) {
      // refresh the running sum to shed accumulated cancellation error
      Matrix fresh(n);
      for (const Matrix& r : ring)
        kernels::active().axpy(1.0, r.data(), fresh.data(), n * n);
      sum = std::move(fresh);
    }
    Matrix w = window_avg(sum);
    last_diff = max_abs_diff(w, prev);
    if (last_diff <= 0.01 * eps) {
      const Matrix aw = matmul(A, w);
      const Matrix wa = matmul(w, A);
      const Matrix ww = matmul(w, w);
      Matrix lw = w;
      kernels::active().scale(lambda, lw.data(), n * n);
      if (max_abs_diff(aw, lw) <= eps && max_abs_diff(wa, lw) <= eps &&
          max_abs_diff(ww, w) <= eps)
        return w;
    }
    prev = std::move(w);
  }
  throw ConvergenceError("dual_matrix: Cesaro window did not settle within cap",
                         last_diff);
}

Vec fundamental_solve(const Matrix& A, const Matrix& Astar, double lambda,
                      const Vec& b) {
  const std::size_t n = A.dim();
  Matrix M(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      M(i, j) = (i == j ? lambda : 0.0) - A(i, j) + Astar(i, j);
  auto x = lu_solve(std::move(M), b);
  if (!x)
    throw NumericError(
        "fundamental system lambda*I - A + A* is singular; A* is "
        "inconsistent with A");
  return *x;
}

std::vector<GrowthDescriptor> growth_descriptors(const ClassStructure& cs,
                                                 const SprClusters& clusters) {
  const int m = cs.graph.size();
  std::vector<double> beta(m);
  std::vector<int> k(m);
  // reverse topological sweep over the condensation
  for (int c = m - 1; c >= 0; --c) {
    double b = clusters.representative(cs.class_spr[c]);
    for (int d : cs.graph.adj[c]) b = std::max(b, beta[d]);
    int kk = (clusters.representative(cs.class_spr[c]) == b) ? 1 : 0;
    int tail = 0;
    for (int d : cs.graph.adj[c])
      if (beta[d] == b) tail = std::max(tail, k[d]);
    beta[c] = b;
    k[c] = kk + tail;
  }
  std::vector<GrowthDescriptor> out(cs.graph.class_of.size());
  for (std::size_t s = 0; s < out.size(); ++s) {
    const int c = cs.graph.class_of[s];
    // beta = 0 means the reachable set is nilpotent: eventually zero, (0,1)
    out[s] = beta[c] == 0.0 ? GrowthDescriptor{0.0, 1}
                            : GrowthDescriptor{beta[c], k[c]};
  }
  return out;
}

std::vector<GrowthDescriptor> growth_descriptors(const Matrix& A,
                                                 double eps_spr) {
  const ClassStructure cs = classify(A, eps_spr);
  return growth_descriptors(cs, SprClusters(cs.class_spr, eps_spr));
}

GrowthDescriptor growth_descriptor(const Matrix& A, int state,
                                   double eps_spr) {
  return growth_descriptors(A, eps_spr)[static_cast<std::size_t>(state)];
}

GrowthDescriptor combine_growth(double lambda, GrowthDescriptor d,
                                double eps_spr) {
  if (approx_equal(d.beta, lambda, eps_spr)) return {lambda, d.k + 1};
  if (d.beta > lambda) return d;
  return {lambda, 1};
}

void alpha_shift(std::vector<Vec>& chain, double alpha) {
  for (std::size_t i = 0; i + 1 < chain.size(); ++i)
    axpy_into(chain[i], alpha, chain[i + 1]);
}

std::optional<std::string> sign_pattern_violation(const EigenChain& chain) {
  const int nu = static_cast<int>(chain.vectors.size());
  for (int i = 1; i <= nu; ++i) {
    const Vec& v = chain.vectors[static_cast<std::size_t>(i - 1)];
    const double scale = std::max(inf_norm(v), 1e-300);
    for (int d = 0; d <= nu && d < static_cast<int>(chain.partition.size());
         ++d) {
      for (int s : chain.partition[static_cast<std::size_t>(d)]) {
        const double x = v[static_cast<std::size_t>(s)];
        const bool must_be_positive = d >= i;
        if (must_be_positive) {
          if (!(x > kPositiveFloor * scale)) {
            std::ostringstream os;
            os << "v^(" << i << ") not positive at state " << s + 1
               << " (depth " << d << "): " << x;
            return os.str();
          }
        } else if (!(std::fabs(x) < kZeroFloor * scale)) {
          std::ostringstream os;
          os << "v^(" << i << ") not zero at state " << s + 1 << " (depth "
             << d << "): " << x;
          return os.str();
        }
      }
    }
  }
  return std::nullopt;
}

namespace {

// Positivity margin targeted by the alpha-shift search, relative to the
// vector scale; comfortably above kPositiveFloor.
constexpr double kShiftMargin = 1e-6;

bool positive_on(const Vec& v, const std::vector<int>& states) {
  const double scale = std::max(inf_norm(v), 1e-300);
  for (int s : states)
    if (!(v[static_cast<std::size_t>(s)] > kShiftMargin * scale))
      return false;
  return true;
}

}  // namespace

EigenChain rothblum_chain(const Matrix& A, double eps_spr) {
  const ClassStructure cs = classify(A, eps_spr);
  const double lambda = cs.spectral_radius;
  if (lambda <= 0.0)
    throw UnsupportedError(
        "rothblum_chain: nilpotent matrix (spectral radius 0)");
  const int nu = cs.degree;
  const std::size_t n = A.dim();
  const auto& part = cs.principal_partition;

  std::vector<Vec> chain;  // chain[i-1] = v^(i) over the levels built so far
  for (int t = 1; t <= nu; ++t) {
    const auto& st = part[static_cast<std::size_t>(t)];
    if (st.empty())
      throw NumericError("rothblum_chain: empty principal partition level");

    if (t == 1) {
      const Matrix blk = submatrix(A, st, st);
      const auto pe = positive_eigenvector_single(blk, eps_spr);
      if (!pe)
        throw NumericError(
            "rothblum_chain: partition block lost basic=final structure");
      Vec v(n, 0.0);
      scatter(v, st, pe->v);
      chain = {std::move(v)};
      continue;
    }

    // Extend the chain of A restricted to the lower levels by the S_t
    // coordinates: the S_t rows reduce to the nested linear system with
    // B = A|_(S_t,S_t) and r_i = (A u^(i))|_(S_t).
    const Matrix B = submatrix(A, st, st);
    const Matrix Bstar = dual_matrix(B);
    std::vector<Vec> r;  // r[i-1] = r_i, i = 1..t-1
    r.reserve(chain.size());
    for (const Vec& u : chain) r.push_back(gather(matvec(A, u), st));

    std::vector<Vec> x(static_cast<std::size_t>(t));
    x[static_cast<std::size_t>(t - 1)] = matvec(Bstar, r.back());
    for (int i = t - 1; i >= 2; --i) {
      Vec rhs = r[static_cast<std::size_t>(i - 1)];
      axpy_into(rhs, 1.0, matvec(Bstar, r[static_cast<std::size_t>(i - 2)]));
      axpy_into(rhs, -1.0, x[static_cast<std::size_t>(i)]);
      x[static_cast<std::size_t>(i - 1)] =
          fundamental_solve(B, Bstar, lambda, rhs);
    }
    {
      Vec rhs = r[0];
      axpy_into(rhs, -1.0, x[1]);
      x[0] = fundamental_solve(B, Bstar, lambda, rhs);
    }

    std::vector<Vec> next(static_cast<std::size_t>(t), Vec(n, 0.0));
    for (int i = 1; i <= t - 1; ++i)
      next[static_cast<std::size_t>(i - 1)] =
          chain[static_cast<std::size_t>(i - 1)];
    for (int i = 1; i <= t; ++i)
      scatter(next[static_cast<std::size_t>(i - 1)], st,
              x[static_cast<std::size_t>(i - 1)]);
    chain = std::move(next);

    // Restore strict positivity on S_t; each shift keeps the equations.
    double alpha = 1.0;
    for (int attempt = 0; attempt < 64; ++attempt) {
      bool ok = true;
      for (const Vec& v : chain) ok = ok && positive_on(v, st);
      if (ok) break;
      if (attempt == 63)
        throw NumericError(
            "rothblum_chain: alpha-shift failed to restore positivity");
      alpha_shift(chain, alpha);
      alpha *= 2.0;
    }
  }

  double scale = 0.0;
  for (const Vec& v : chain) scale = std::max(scale, inf_norm(v));
  if (scale > 0.0)
    for (Vec& v : chain) v = scaled(std::move(v), 1.0 / scale);

  EigenChain result{lambda, std::move(chain), part};

  // Fail loud if the construction drifted: residuals of all equations.
  for (int i = 1; i <= nu; ++i) {
    Vec lhs = matvec(A, result.vectors[static_cast<std::size_t>(i - 1)]);
    Vec rhs = scaled(result.vectors[static_cast<std::size_t>(i - 1)], lambda);
    if (i < nu) axpy_into(rhs, 1.0, result.vectors[static_cast<std::size_t>(i)]);
    if (max_abs_diff(lhs, rhs) > 1e-7 * std::max(1.0, lambda))
      throw NumericError("rothblum_chain: residual check failed");
  }
  return result;
}

}  // namespace matgrowth
