#include "matgrowth/classgraph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

namespace matgrowth {

namespace {

std::vector<std::vector<int>> positivity_digraph(const Matrix& A) {
  const int n = static_cast<int>(A.dim());
  std::vector<std::vector<int>> g(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (A(i, j) > 0.0) g[i].push_back(j);
  return g;
}

}  // namespace

ClassGraph classes(const Matrix& A) {
  const int n = static_cast<int>(A.dim());
  const auto g = positivity_digraph(A);

  // Iterative Tarjan; components complete in reverse topological order.
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<int> stack;
  std::vector<std::vector<int>> sccs;
  int next_index = 0;

  struct Frame {
    int v;
    std::size_t ei;
  };
  for (int root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    std::vector<Frame> call{{root, 0}};
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.ei < g[f.v].size()) {
        const int w = g[f.v][f.ei++];
        if (index[w] == -1) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
      } else {
        const int v = f.v;
        call.pop_back();
        if (!call.empty())
          low[call.back().v] = std::min(low[call.back().v], low[v]);
        if (low[v] == index[v]) {
          std::vector<int> scc;
          int w;
          do {
            w = stack.back();
            stack.pop_back();
            on_stack[w] = 0;
            scc.push_back(w);
          } while (w != v);
          std::sort(scc.begin(), scc.end());
          sccs.push_back(std::move(scc));
        }
      }
    }
  }
  std::reverse(sccs.begin(), sccs.end());

  ClassGraph cg;
  cg.classes = std::move(sccs);
  const int m = cg.size();
  cg.class_of.assign(n, -1);
  for (int c = 0; c < m; ++c)
    for (int s : cg.classes[c]) cg.class_of[s] = c;

  std::vector<std::vector<char>> has_edge(m, std::vector<char>(m, 0));
  for (int i = 0; i < n; ++i)
    for (int j : g[i]) {
      const int c = cg.class_of[i], d = cg.class_of[j];
      if (c != d) has_edge[c][d] = 1;
    }
  cg.adj.resize(m);
  for (int c = 0; c < m; ++c)
    for (int d = 0; d < m; ++d)
      if (has_edge[c][d]) {
        cg.edges.emplace_back(c, d);
        cg.adj[c].push_back(d);
      }

  // Reachability over the condensation; classes are in topological order so
  // one reverse sweep suffices.
  cg.reach.assign(m, std::vector<char>(m, 0));
  for (int c = m - 1; c >= 0; --c) {
    cg.reach[c][c] = 1;
    for (int d : cg.adj[c])
      for (int e = 0; e < m; ++e) cg.reach[c][e] |= cg.reach[d][e];
  }
  return cg;
}

ClassStructure classify(const Matrix& A, double eps_spr) {
  ClassStructure cs;
  cs.graph = classes(A);
  const int m = cs.graph.size();

  cs.class_spr.resize(m);
  for (int c = 0; c < m; ++c)
    cs.class_spr[c] = irreducible_perron(A, cs.graph.classes[c]).value;
  cs.spectral_radius =
      *std::max_element(cs.class_spr.begin(), cs.class_spr.end());

  cs.is_basic.resize(m);
  cs.is_final.resize(m);
  for (int c = 0; c < m; ++c) {
    cs.is_basic[c] = std::fabs(cs.class_spr[c] - cs.spectral_radius) <=
                     eps_spr * cs.spectral_radius;
    cs.is_final[c] = cs.graph.adj[c].empty();
  }

  // depth(C) = number of basic classes in the longest chain starting at C;
  // reverse topological sweep.
  cs.depth.assign(m, 0);
  for (int c = m - 1; c >= 0; --c) {
    int best = 0;
    for (int d : cs.graph.adj[c]) best = std::max(best, cs.depth[d]);
    cs.depth[c] = best + (cs.is_basic[c] ? 1 : 0);
  }
  cs.degree = *std::max_element(cs.depth.begin(), cs.depth.end());

  cs.principal_partition.assign(cs.degree + 1, {});
  for (int c = 0; c < m; ++c)
    for (int s : cs.graph.classes[c])
      cs.principal_partition[cs.depth[c]].push_back(s);
  for (auto& part : cs.principal_partition)
    std::sort(part.begin(), part.end());
  return cs;
}

int class_period(const Matrix& A, std::span<const int> cls) {
  const int m = static_cast<int>(cls.size());
  std::vector<int> pos(A.dim(), -1);
  for (int i = 0; i < m; ++i) pos[cls[i]] = i;

  std::vector<int> level(m, -1);
  std::queue<int> q;
  level[0] = 0;
  q.push(0);
  int g = 0;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (std::size_t j = 0; j < A.dim(); ++j) {
      if (A(static_cast<std::size_t>(cls[u]), j) <= 0.0) continue;
      const int v = pos[j];
      if (v < 0) continue;  // edge leaves the class
      if (level[v] == -1) {
        level[v] = level[u] + 1;
        q.push(v);
      } else {
        g = std::gcd(g, std::abs(level[u] + 1 - level[v]));
      }
    }
  }
  return std::max(g, 1);
}

}  // namespace matgrowth
