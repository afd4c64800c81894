#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "internal.hpp"

namespace dynrank {

double rank_contribution(const Graph& graph, std::span<const double> ranks, VertexId v,
                         double damping) {
  const std::size_t n = graph.num_vertices();
  if (ranks.size() != n)
    throw std::invalid_argument("rank vector has " + std::to_string(ranks.size()) +
                                " entries, graph has " + std::to_string(n) + " vertices");
  const double base = (1.0 - damping) / static_cast<double>(n);
  return detail::compute_rank(graph, v, base, damping, [&](VertexId u) { return ranks[u]; });
}

double linf_norm(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw std::invalid_argument("linf_norm: length mismatch (" + std::to_string(a.size()) +
                                " vs " + std::to_string(b.size()) + ")");
  double norm = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) norm = std::max(norm, std::abs(a[i] - b[i]));
  return norm;
}

void visit_dfs(FlagVectors& flags, const Graph& graph, VertexId start, bool mark_not_converged) {
  std::vector<VertexId> stack;
  detail::dfs_mark(flags, graph, start, stack, [&](VertexId v) {
    if (mark_not_converged) flags.set_not_converged(v);
  });
}

void mark_initial_affected(const Graph& prev, const Graph& curr, const BatchUpdate& batch,
                           FlagVectors& flags, bool mark_not_converged) {
  for (const Edge& e : detail::batch_edges(&batch)) {
    detail::for_each_union_out(prev, curr, e.source, [&](VertexId v) {
      flags.mark_affected(v);
      if (mark_not_converged) flags.set_not_converged(v);
    });
    flags.mark_checked(e.source);
  }
}

void mark_traversal_affected(const Graph& prev, const Graph& curr, const BatchUpdate& batch,
                             FlagVectors& flags, bool mark_not_converged) {
  std::vector<VertexId> stack;
  auto on_mark = [&](VertexId v) {
    if (mark_not_converged) flags.set_not_converged(v);
  };
  for (const Edge& e : detail::batch_edges(&batch)) {
    detail::for_each_union_out(prev, curr, e.source, [&](VertexId v) {
      detail::dfs_mark(flags, curr, v, stack, on_mark);
    });
    flags.mark_checked(e.source);
  }
}

namespace detail {

void fill_affected_stats(const Problem& p, const FlagVectors& final_flags, RunReport& report) {
  const std::size_t n = p.curr.num_vertices();
  if (!needs_marking(p.variant)) {
    report.affected_initial = report.affected_total = n;
    return;
  }
  FlagVectors initial(n);
  if (p.variant == Variant::kTraversal)
    mark_traversal_affected(*p.prev, p.curr, *p.batch, initial);
  else
    mark_initial_affected(*p.prev, p.curr, *p.batch, initial);
  report.affected_initial = initial.count_affected();
  report.affected_total = final_flags.count_affected();
  report.affected = final_flags.affected_snapshot();
}

}  // namespace detail
}  // namespace dynrank
