#pragma once

// Test-side oracles and fixtures. Nothing here calls into the library's rank
// or traversal code, so results can be compared against it independently.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <random>
#include <set>
#include <vector>

#include "dynrank/graph.hpp"

namespace dynrank::support {

/// Column-stochastic transition matrix: M(v, u) = 1/|out(u)| for each u→v.
inline Eigen::MatrixXd transition_matrix(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_vertices());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (VertexId u = 0; u < g.num_vertices(); ++u)
    for (VertexId v : g.out_neighbors(u)) m(v, u) += 1.0 / static_cast<double>(g.out_degree(u));
  return m;
}

/// Solves R = (1-α)/n + α M R directly.
inline std::vector<double> dense_solve_pagerank(const Graph& g, double alpha = 0.85) {
  const auto n = static_cast<Eigen::Index>(g.num_vertices());
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - alpha * transition_matrix(g);
  Eigen::VectorXd b = Eigen::VectorXd::Constant(n, (1.0 - alpha) / static_cast<double>(n));
  Eigen::VectorXd x = a.partialPivLu().solve(b);
  return {x.data(), x.data() + n};
}

/// Dense power iteration until the iterate stops changing (cap 10000 steps).
inline std::vector<double> dense_power_pagerank(const Graph& g, double alpha = 0.85) {
  const auto n = static_cast<Eigen::Index>(g.num_vertices());
  const Eigen::MatrixXd m = alpha * transition_matrix(g);
  const Eigen::VectorXd teleport =
      Eigen::VectorXd::Constant(n, (1.0 - alpha) / static_cast<double>(n));
  Eigen::VectorXd r = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  for (int it = 0; it < 10000; ++it) {
    Eigen::VectorXd next = teleport + m * r;
    const bool fixed = (next - r).lpNorm<Eigen::Infinity>() == 0.0;
    r = next;
    if (fixed) break;
  }
  return {r.data(), r.data() + n};
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

/// Distinct random non-loop edges, about avg_degree per vertex.
inline std::vector<Edge> random_edges(std::size_t n, double avg_degree, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<VertexId> pick(0, static_cast<VertexId>(n - 1));
  const auto target = static_cast<std::size_t>(avg_degree * static_cast<double>(n));
  const std::size_t cap = n * (n - 1);
  std::set<std::pair<VertexId, VertexId>> seen;
  std::vector<Edge> edges;
  while (edges.size() < std::min(target, cap)) {
    const VertexId u = pick(rng), v = pick(rng);
    if (u == v || !seen.insert({u, v}).second) continue;
    edges.push_back({u, v});
  }
  return edges;
}

inline Graph random_graph(std::size_t n, double avg_degree, std::uint64_t seed) {
  return Graph::build(random_edges(n, avg_degree, seed), n, true);
}

/// Vertices reachable from any of `starts` (inclusive) by BFS over out-edges.
inline std::vector<std::uint8_t> reachable_from(const Graph& g, const std::vector<VertexId>& starts) {
  std::vector<std::uint8_t> seen(g.num_vertices(), 0);
  std::queue<VertexId> queue;
  for (VertexId s : starts)
    if (!seen[s]) seen[s] = 1, queue.push(s);
  while (!queue.empty()) {
    const VertexId u = queue.front();
    queue.pop();
    for (VertexId v : g.out_neighbors(u))
      if (!seen[v]) seen[v] = 1, queue.push(v);
  }
  return seen;
}

/// Reflexive transitive closure by Floyd-Warshall on the adjacency matrix.
inline std::vector<std::vector<bool>> transitive_closure(const Graph& g) {
  const std::size_t n = g.num_vertices();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (std::size_t u = 0; u < n; ++u) {
    reach[u][u] = true;
    for (VertexId v : g.out_neighbors(static_cast<VertexId>(u))) reach[u][v] = true;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (reach[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (reach[k][j]) reach[i][j] = true;
  return reach;
}

/// Sources of every batch edge, deletions first.
inline std::vector<VertexId> batch_sources(const BatchUpdate& batch) {
  std::vector<VertexId> out;
  for (const Edge& e : batch.deletions) out.push_back(e.source);
  for (const Edge& e : batch.insertions) out.push_back(e.source);
  return out;
}

/// Brute-force traversal-affected set: everything reachable in curr from
/// prev.out(u) ∪ curr.out(u) for each batch source u.
inline std::vector<std::uint8_t> traversal_oracle(const Graph& prev, const Graph& curr,
                                                  const BatchUpdate& batch) {
  std::vector<VertexId> starts;
  for (VertexId u : batch_sources(batch)) {
    for (VertexId v : prev.out_neighbors(u)) starts.push_back(v);
    for (VertexId v : curr.out_neighbors(u)) starts.push_back(v);
  }
  return reachable_from(curr, starts);
}

}  // namespace dynrank::support
