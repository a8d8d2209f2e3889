#include "matgrowth/minmax.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "matgrowth/classgraph.hpp"
#include "matgrowth/errors.hpp"

namespace matgrowth {

namespace {

constexpr double kEqTol = 1e-9;       // relative tolerance for equality sets
constexpr double kShiftMargin = 1e-6;

std::uint64_t iteration_cap(const RowChoiceFamily& F) {
  return std::min<std::uint64_t>(F.closure_size(), 1'000'000);
}

double chain_scale(const std::vector<Vec>& vs) {
  double s = 0.0;
  for (const Vec& v : vs) s = std::max(s, inf_norm(v));
  return std::max(s, 1e-300);
}

}  // namespace

std::optional<PositiveEigenpair> positive_eigenvector_min(
    const RowChoiceFamily& F, Strategy strategy, std::uint64_t cap,
    double eps_spr, double eps_res) {
  const ExtremalResult er = extremal_matrix(F, Mode::Min, strategy, cap,
                                            eps_spr);
  const auto pe = positive_eigenvector_single(er.matrix, eps_spr);
  if (!pe) return std::nullopt;

  const double lambda = pe->lambda;
  Policy B = er.policy;
  Vec v = pe->v;

  const std::uint64_t steps = iteration_cap(F);
  for (std::uint64_t it = 0; it <= steps; ++it) {
    const Policy D = select_policy(F, v, Mode::Min, &B);
    if (D == B) {
      const Vec fv = apply(F, v, Mode::Min);
      const Vec lv = scaled(v, lambda);
      if (max_abs_diff(fv, lv) > eps_res * inf_norm(v))
        throw NumericError(
            "positive_eigenvector_min: converged policy violates the "
            "eigen-residual");
      return PositiveEigenpair{lambda, v};
    }

    const Matrix M = assemble(F, D);
    const ClassStructure cs = classify(M, eps_spr);
    std::vector<int> s1, s2;
    for (int c = 0; c < cs.graph.size(); ++c) {
      if (cs.is_final[c] != cs.is_basic[c])
        throw NumericError(
            "positive_eigenvector_min: improved policy lost the basic=final "
            "structure (tie-break or tol-spr misconfiguration)");
      auto& dst = cs.is_final[c] ? s1 : s2;
      dst.insert(dst.end(), cs.graph.classes[c].begin(),
                 cs.graph.classes[c].end());
    }
    std::sort(s1.begin(), s1.end());
    std::sort(s2.begin(), s2.end());

    Vec u = v;
    if (!s2.empty())
      scatter(u, s2,
              extend_through_transient(M, s2, s1, gather(v, s1), lambda));

    // The proof gives v >= u > 0; drift beyond slack indicates a problem.
    const double slack = 1e-8 * inf_norm(v);
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (u[i] > v[i] + slack || !(u[i] > 0.0))
        throw NumericError(
            "positive_eigenvector_min: eigenvector update left the "
            "monotone corridor");
    }
    B = D;
    v = normalized(std::move(u));
  }
  throw ConvergenceError(
      "positive_eigenvector_min: policy iteration exceeded the closure-size "
      "cap (tie-break misconfiguration?)",
      lambda);
}

IrreducibleEigenpair irreducible_eigenvector_min(const RowChoiceFamily& F,
                                                 std::uint64_t cap,
                                                 double eps_spr,
                                                 double eps_res) {
  // Precondition: every matrix of the closure irreducible.
  if (F.closure_size() <= cap) {
    for_each_closure(F, cap, [&](const Policy&, const Matrix& M) {
      if (classes(M).size() != 1)
        throw PreconditionError(
            "irreducible_eigenvector_min: closure contains a reducible "
            "matrix");
    });
  } else {
    for (const auto& row : F.rows) {
      for (const Vec& c : row) {
        for (std::size_t j = 0; j < c.size(); ++j) {
          if ((c[j] > 0.0) != (row.front()[j] > 0.0))
            throw PreconditionError(
                "irreducible_eigenvector_min: closure too large to "
                "enumerate and row choices do not share one zero pattern");
        }
      }
    }
    Policy zero;
    zero.choice.assign(static_cast<std::size_t>(F.n), 0);
    if (classes(assemble(F, zero)).size() != 1)
      throw PreconditionError(
          "irreducible_eigenvector_min: shared zero pattern is reducible");
  }

  const auto solve = [&](Policy B) {
    Matrix M = assemble(F, B);
    PerronResult pr = irreducible_perron(M, classes(M).classes[0]);
    const std::uint64_t steps = iteration_cap(F);
    for (std::uint64_t it = 0; it <= steps; ++it) {
      const Policy D = select_policy(F, pr.vector, Mode::Min, &B);
      if (D == B) return std::make_pair(pr.value, pr.vector);
      B = D;
      M = assemble(F, B);
      pr = irreducible_perron(M, classes(M).classes[0]);
    }
    throw ConvergenceError(
        "irreducible_eigenvector_min: policy iteration exceeded cap",
        pr.value);
  };

  Policy start0, start1;
  start0.choice.assign(static_cast<std::size_t>(F.n), 0);
  for (const auto& r : F.rows)
    start1.choice.push_back(static_cast<int>(r.size()) - 1);

  const auto [lambda, v] = solve(start0);
  const auto [lambda2, v2] = solve(start1);

  const Vec fv = apply(F, v, Mode::Min);
  if (max_abs_diff(fv, scaled(v, lambda)) > eps_res * inf_norm(v))
    throw NumericError("irreducible_eigenvector_min: eigen-residual failed");

  const bool unique = approx_equal(lambda, lambda2, eps_spr) &&
                      max_abs_diff(v, v2) <= 1e-8;
  return {lambda, v, unique};
}

std::vector<Vec> solve_nested_linear(const Matrix& B, double lambda,
                                     const Matrix& Bstar,
                                     const std::vector<Vec>& r) {
  const int t = static_cast<int>(r.size()) + 1;
  std::vector<Vec> v(static_cast<std::size_t>(t));
  if (t == 1) {
    v[0] = Vec(B.dim(), 0.0);
    return v;
  }
  v[static_cast<std::size_t>(t - 1)] = matvec(Bstar, r.back());
  for (int i = t - 1; i >= 2; --i) {
    Vec rhs = r[static_cast<std::size_t>(i - 1)];
    axpy_into(rhs, 1.0, matvec(Bstar, r[static_cast<std::size_t>(i - 2)]));
    axpy_into(rhs, -1.0, v[static_cast<std::size_t>(i)]);
    v[static_cast<std::size_t>(i - 1)] =
        fundamental_solve(B, Bstar, lambda, rhs);
  }
  Vec rhs = r[0];
  axpy_into(rhs, -1.0, v[1]);
  v[0] = fundamental_solve(B, Bstar, lambda, rhs);
  return v;
}

namespace {

// Per-row admissible sets: level t keeps the minimizers of row . v^(t);
// level i < t narrows to choices meeting equation i within tolerance.
std::vector<std::vector<std::vector<int>>> shrinking_sets_for(
    const RowChoiceFamily& F, int t, const RowLocalR& r, double lambda,
    const std::vector<Vec>& v) {
  const std::size_t n = static_cast<std::size_t>(F.n);
  double scale = std::max(1.0, chain_scale(v));
  std::vector<std::vector<std::vector<int>>> sets;
  std::vector<std::vector<int>> cur(n);

  // K_t
  for (std::size_t row = 0; row < n; ++row) {
    double best = dot(F.rows[row][0], v[static_cast<std::size_t>(t - 1)]);
    for (std::size_t c = 1; c < F.rows[row].size(); ++c)
      best = std::min(best,
                      dot(F.rows[row][c], v[static_cast<std::size_t>(t - 1)]));
    for (std::size_t c = 0; c < F.rows[row].size(); ++c)
      if (dot(F.rows[row][c], v[static_cast<std::size_t>(t - 1)]) <=
          best + kEqTol * scale)
        cur[row].push_back(static_cast<int>(c));
  }
  sets.push_back(cur);

  for (int i = t - 1; i >= 1; --i) {
    std::vector<std::vector<int>> next(n);
    for (std::size_t row = 0; row < n; ++row) {
      const double target = lambda * v[static_cast<std::size_t>(i - 1)][row] +
                            v[static_cast<std::size_t>(i)][row];
      for (int c : cur[row]) {
        const double val =
            dot(F.rows[row][static_cast<std::size_t>(c)],
                v[static_cast<std::size_t>(i - 1)]) +
            r(i, static_cast<int>(row), c);
        if (std::fabs(val - target) <= kEqTol * scale) next[row].push_back(c);
      }
    }
    sets.push_back(next);
    cur = std::move(next);
  }
  return sets;
}

}  // namespace

NestedSolution nested_policy_iteration(const RowChoiceFamily& F, int t,
                                       const RowLocalR& r, Strategy strategy,
                                       std::uint64_t cap, double eps_spr,
                                       double eps_res) {
  if (t < 1) throw PreconditionError("nested_policy_iteration: t < 1");

  if (t == 1) {
    const auto pe = positive_eigenvector_min(F, strategy, cap, eps_spr,
                                             eps_res);
    if (!pe)
      throw PreconditionError(
          "nested_policy_iteration: no <=-minimal matrix with strictly "
          "positive eigenvector");
    NestedSolution sol;
    sol.t = 1;
    sol.vectors = {pe->v};
    sol.policy = select_policy(F, pe->v, Mode::Min, nullptr);
    sol.shrinking_sets =
        shrinking_sets_for(F, 1, r, pe->lambda, sol.vectors);
    return sol;
  }

  const ExtremalResult er = extremal_matrix(F, Mode::Min, strategy, cap,
                                            eps_spr);
  if (!positive_eigenvector_single(er.matrix, eps_spr))
    throw PreconditionError(
        "nested_policy_iteration: <=-minimal matrix has no strictly "
        "positive eigenvector");
  const double lambda = er.lambda;
  const std::size_t n = static_cast<std::size_t>(F.n);

  const auto r_vectors = [&](const Policy& p) {
    std::vector<Vec> rv(static_cast<std::size_t>(t - 1), Vec(n, 0.0));
    for (int i = 1; i <= t - 1; ++i)
      for (std::size_t row = 0; row < n; ++row)
        rv[static_cast<std::size_t>(i - 1)][row] =
            r(i, static_cast<int>(row), p.choice[row]);
    return rv;
  };

  Policy B = er.policy;
  std::vector<Vec> v;
  Vec prev_top;

  const std::uint64_t steps = iteration_cap(F);
  for (std::uint64_t it = 0; it <= steps; ++it) {
    const Matrix M = assemble(F, B);
    const Matrix Mstar = dual_matrix(M);
    const auto rv = r_vectors(B);

    if (it == 0) {
      // Lemma hypothesis: B* r_(t-1)(B) > 0 for the <=-minimal incumbent.
      const Vec h = matvec(Mstar, rv.back());
      for (double x : h)
        if (!(x > 0.0))
          throw PreconditionError(
              "nested_policy_iteration: hypothesis B* r_(t-1)(B) > 0 fails");
    }

    v = solve_nested_linear(M, lambda, Mstar, rv);

    if (!prev_top.empty()) {
      // monotone progress of the top vector across improvement steps
      const double slack = 1e-8 * std::max(1.0, inf_norm(prev_top));
      for (std::size_t i = 0; i < n; ++i)
        if (v[static_cast<std::size_t>(t - 1)][i] > prev_top[i] + slack)
          throw NumericError(
              "nested_policy_iteration: top vector increased across an "
              "improvement step");
    }
    prev_top = v[static_cast<std::size_t>(t - 1)];

    // Lexicographic per-row improvement through equations t, t-1, ..., 1.
    const double scale = std::max(1.0, chain_scale(v));
    const double tol = kEqTol * scale;
    Policy D;
    D.choice.resize(n);
    bool changed = false;
    for (std::size_t row = 0; row < n; ++row) {
      std::vector<int> adm(F.rows[row].size());
      for (std::size_t c = 0; c < adm.size(); ++c)
        adm[c] = static_cast<int>(c);
      for (int level = t; level >= 1 && adm.size() > 1; --level) {
        std::vector<double> vals;
        vals.reserve(adm.size());
        for (int c : adm) {
          double val = dot(F.rows[row][static_cast<std::size_t>(c)],
                           v[static_cast<std::size_t>(level - 1)]);
          if (level < t) val += r(level, static_cast<int>(row), c);
          vals.push_back(val);
        }
        const double best = *std::min_element(vals.begin(), vals.end());
        std::vector<int> keep;
        for (std::size_t idx = 0; idx < adm.size(); ++idx)
          if (vals[idx] <= best + tol) keep.push_back(adm[idx]);
        adm = std::move(keep);
      }
      const int inc = B.choice[row];
      D.choice[row] = std::find(adm.begin(), adm.end(), inc) != adm.end()
                          ? inc
                          : adm.front();
      changed = changed || D.choice[row] != inc;
    }

    if (!changed) {
      NestedSolution sol;
      sol.t = t;
      sol.vectors = v;
      sol.policy = B;
      sol.shrinking_sets = shrinking_sets_for(F, t, r, lambda, v);

      // Final conditions of the lemma, checked over the shrinking sets.
      for (std::size_t row = 0; row < n; ++row) {
        double best = dot(F.rows[row][0], v[static_cast<std::size_t>(t - 1)]);
        for (std::size_t c = 1; c < F.rows[row].size(); ++c)
          best = std::min(best, dot(F.rows[row][c],
                                    v[static_cast<std::size_t>(t - 1)]));
        if (std::fabs(best - lambda * v[static_cast<std::size_t>(t - 1)][row]) >
            eps_res * scale)
          throw NumericError(
              "nested_policy_iteration: top equation residual too large");
      }
      for (int i = t - 1; i >= 1; --i) {
        const auto& adm = sol.shrinking_sets[static_cast<std::size_t>(t - i -
                                                                      1)];
        for (std::size_t row = 0; row < n; ++row) {
          double best = std::numeric_limits<double>::infinity();
          for (int c : adm[row])
            best = std::min(
                best, dot(F.rows[row][static_cast<std::size_t>(c)],
                          v[static_cast<std::size_t>(i - 1)]) +
                          r(i, static_cast<int>(row), c));
          const double target =
              lambda * v[static_cast<std::size_t>(i - 1)][row] +
              v[static_cast<std::size_t>(i)][row];
          if (std::fabs(best - target) > eps_res * scale)
            throw NumericError(
                "nested_policy_iteration: nested equation residual too "
                "large");
        }
      }
      for (double x : sol.vectors[static_cast<std::size_t>(t - 1)])
        if (!(x > 0.0))
          throw NumericError("nested_policy_iteration: v^(t) not positive");
      return sol;
    }

    if (!positive_eigenvector_single(assemble(F, D), eps_spr))
      throw NumericError(
          "nested_policy_iteration: improved policy lost the strictly "
          "positive eigenvector (tie tolerance misconfiguration?)");
    B = D;
  }
  throw ConvergenceError("nested_policy_iteration: iteration cap exceeded",
                         lambda);
}

// ---------------------------------------------------------------------------
// generalized chain of f_K
// ---------------------------------------------------------------------------

namespace {

// A sub-family over a state subset with a restricted choice set per row;
// choice_map recovers the indices of the enclosing family.
struct SubView {
  std::vector<int> states;                   // enclosing ids, sorted
  std::vector<std::vector<int>> choice_map;  // local row -> enclosing choices
  RowChoiceFamily fam;
};

SubView make_view(const RowChoiceFamily& F, const std::vector<int>& states,
                  const std::vector<std::vector<int>>& allowed) {
  SubView v;
  v.states = states;
  v.choice_map = allowed;
  v.fam.n = static_cast<int>(states.size());
  v.fam.rows.resize(states.size());
  for (std::size_t a = 0; a < states.size(); ++a) {
    for (int c : allowed[a]) {
      const Vec& full =
          F.rows[static_cast<std::size_t>(states[a])][static_cast<std::size_t>(
              c)];
      Vec masked(states.size());
      for (std::size_t b = 0; b < states.size(); ++b)
        masked[b] = full[static_cast<std::size_t>(states[b])];
      v.fam.rows[a].push_back(std::move(masked));
    }
  }
  return v;
}

std::vector<std::vector<int>> all_choices(const RowChoiceFamily& F,
                                          const std::vector<int>& states) {
  std::vector<std::vector<int>> allowed(states.size());
  for (std::size_t a = 0; a < states.size(); ++a) {
    const auto& row = F.rows[static_cast<std::size_t>(states[a])];
    for (int c = 0; c < static_cast<int>(row.size()); ++c)
      allowed[a].push_back(c);
  }
  return allowed;
}

// Chain for the (already materialized) family F, vectors indexed locally.
// Satisfies the shrinking-set equations and the sign pattern against F's
// own principal <=-minimal partition.
std::vector<Vec> chain_rec(const RowChoiceFamily& F, Strategy strategy,
                           std::uint64_t cap, double eps_spr,
                           double eps_res) {
  const MinimalPartition mp = minimal_partition(F, strategy, cap, eps_spr);
  const double lambda = mp.lambda;
  const int nu = mp.degree;
  const std::size_t n = static_cast<std::size_t>(F.n);
  if (nu < 1)
    throw NumericError("chain construction: degree 0 with positive lambda");

  if (nu == 1) {
    const auto& s1 = mp.partition[1];
    const SubView top = make_view(F, s1, all_choices(F, s1));
    const auto pe = positive_eigenvector_min(top.fam, strategy, cap, eps_spr,
                                             eps_res);
    if (!pe)
      throw NumericError(
          "chain construction: top partition block lost its positive "
          "eigenvector");
    Vec v(n, 0.0);
    scatter(v, s1, pe->v);
    return {std::move(v)};
  }

  const auto& st = mp.partition[static_cast<std::size_t>(nu)];
  std::vector<int> rest;
  for (int d = 0; d < nu; ++d)
    rest.insert(rest.end(), mp.partition[static_cast<std::size_t>(d)].begin(),
                mp.partition[static_cast<std::size_t>(d)].end());
  std::sort(rest.begin(), rest.end());

  // Sub-family H: rows outside S_nu restricted to choices with zero entries
  // into S_nu (exact zeros; the zero pattern is structural).
  std::vector<std::vector<int>> allowed(rest.size());
  for (std::size_t a = 0; a < rest.size(); ++a) {
    const auto& row = F.rows[static_cast<std::size_t>(rest[a])];
    for (int c = 0; c < static_cast<int>(row.size()); ++c) {
      bool zero = true;
      for (int s : st)
        zero = zero &&
               row[static_cast<std::size_t>(c)][static_cast<std::size_t>(s)] ==
                   0.0;
      if (zero) allowed[a].push_back(c);
    }
    if (allowed[a].empty())
      throw NumericError(
          "chain construction: no zero-into-top choice for a lower row "
          "(partition inconsistency)");
  }
  const SubView H = make_view(F, rest, allowed);
  const std::vector<Vec> u_local =
      chain_rec(H.fam, strategy, cap, eps_spr, eps_res);
  if (static_cast<int>(u_local.size()) != nu - 1)
    throw NumericError("chain construction: sub-family degree mismatch");

  std::vector<Vec> u(u_local.size(), Vec(n, 0.0));
  for (std::size_t i = 0; i < u_local.size(); ++i)
    scatter(u[i], rest, u_local[i]);

  // Nested equations on the S_nu block; r_i(A) row j collects A's row-j
  // entries into the lower levels against u^(i).
  const SubView G = make_view(F, st, all_choices(F, st));
  const RowLocalR r = [&](int level, int row, int choice) {
    const Vec& full = F.rows[static_cast<std::size_t>(st[static_cast<
        std::size_t>(row)])][static_cast<std::size_t>(choice)];
    double s = 0.0;
    for (std::size_t b = 0; b < rest.size(); ++b)
      s += full[static_cast<std::size_t>(rest[b])] *
           u[static_cast<std::size_t>(level - 1)]
            [static_cast<std::size_t>(rest[b])];
    return s;
  };
  const NestedSolution nested = nested_policy_iteration(
      G.fam, nu, r, strategy, cap, eps_spr, eps_res);

  std::vector<Vec> chain(static_cast<std::size_t>(nu), Vec(n, 0.0));
  for (int i = 1; i <= nu - 1; ++i) chain[static_cast<std::size_t>(i - 1)] =
      u[static_cast<std::size_t>(i - 1)];
  for (int i = 1; i <= nu; ++i)
    scatter(chain[static_cast<std::size_t>(i - 1)], st,
            nested.vectors[static_cast<std::size_t>(i - 1)]);

  // Restore strict positivity on S_nu; shifts keep all equations.
  double alpha = 1.0;
  for (int attempt = 0;; ++attempt) {
    bool ok = true;
    for (const Vec& v : chain) {
      const double s = std::max(inf_norm(v), 1e-300);
      for (int j : st) ok = ok && v[static_cast<std::size_t>(j)] >
                                      kShiftMargin * s;
    }
    if (ok) break;
    if (attempt >= 64)
      throw NumericError(
          "chain construction: alpha-shift failed to restore positivity on "
          "the top level");
    alpha_shift(chain, alpha);
    alpha *= 2.0;
  }
  return chain;
}

double full_family_residual(const RowChoiceFamily& F, double lambda,
                            const std::vector<Vec>& chain) {
  double worst = 0.0;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    Vec lhs = apply(F, chain[i], Mode::Min);
    Vec rhs = scaled(chain[i], lambda);
    if (i + 1 < chain.size()) axpy_into(rhs, 1.0, chain[i + 1]);
    worst = std::max(worst, max_abs_diff(lhs, rhs));
  }
  return worst;
}

}  // namespace

EigenChain generalized_chain_min(const RowChoiceFamily& F, Strategy strategy,
                                 std::uint64_t cap, double eps_spr,
                                 double eps_res) {
  const MinimalPartition mp = minimal_partition(F, strategy, cap, eps_spr);
  if (mp.lambda <= 0.0)
    throw UnsupportedError("generalized_chain_min: lambda = 0 (nilpotent)");

  std::vector<Vec> chain = chain_rec(F, strategy, cap, eps_spr, eps_res);

  // Promote shrinking-set minima to minima over the full family; the
  // theorem guarantees a large enough alpha works. Tested directly.
  EigenChain result{mp.lambda, {}, mp.partition};
  double alpha = 1.0;
  for (int attempt = 0;; ++attempt) {
    const double scale = chain_scale(chain);
    result.vectors = chain;
    const bool residual_ok =
        full_family_residual(F, mp.lambda, chain) <= eps_res * scale;
    const bool pattern_ok = !sign_pattern_violation(result).has_value();
    if (residual_ok && pattern_ok) break;
    if (attempt >= 64) {
      std::ostringstream os;
      os << "generalized_chain_min: alpha search failed; residual "
         << full_family_residual(F, mp.lambda, chain);
      if (auto v = sign_pattern_violation(result)) os << "; " << *v;
      throw ConvergenceError(os.str(), alpha);
    }
    alpha_shift(chain, alpha);
    alpha *= 2.0;
  }

  const double scale = chain_scale(result.vectors);
  for (Vec& v : result.vectors) v = scaled(std::move(v), 1.0 / scale);
  return result;
}

GrowthDescriptor growth(const RowChoiceFamily& F, Mode mode, int state,
                        Strategy strategy, std::uint64_t cap,
                        double eps_spr) {
  return extremal_matrix(F, mode, strategy, cap, eps_spr)
      .descriptors[static_cast<std::size_t>(state)];
}

Characterization characterize(const RowChoiceFamily& F, Strategy strategy,
                              std::uint64_t cap, double eps_spr,
                              double eps_res) {
  Characterization ch;
  ch.has_positive_eigenvector =
      positive_eigenvector_min(F, strategy, cap, eps_spr, eps_res)
          .has_value();

  const ExtremalResult er = extremal_matrix(F, Mode::Min, strategy, cap,
                                            eps_spr);
  const ClassStructure cs = classify(er.matrix, eps_spr);
  ch.structure_test = true;
  for (int c = 0; c < cs.graph.size(); ++c)
    ch.structure_test =
        ch.structure_test && cs.is_basic[c] == cs.is_final[c];

  ch.all_growth_lambda = true;
  ch.uniform_growth = true;
  const GrowthDescriptor lambda1{er.lambda, 1};
  for (const auto& d : er.descriptors) {
    ch.all_growth_lambda =
        ch.all_growth_lambda && compare(d, lambda1, eps_spr) == 0;
    ch.uniform_growth = ch.uniform_growth &&
                        compare(d, er.descriptors.front(), eps_spr) == 0;
  }
  ch.consistent = ch.has_positive_eigenvector == ch.structure_test &&
                  ch.structure_test == ch.all_growth_lambda &&
                  ch.all_growth_lambda == ch.uniform_growth;
  return ch;
}

}  // namespace matgrowth
