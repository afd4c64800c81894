#include "dynrank/graph.hpp"

#include <algorithm>
#include <iterator>
#include <sstream>

namespace dynrank {

namespace {

std::string describe(const std::string& prefix, const std::vector<Edge>& edges) {
  std::ostringstream out;
  out << prefix << ":";
  constexpr std::size_t kShown = 8;
  for (std::size_t i = 0; i < edges.size() && i < kShown; ++i)
    out << " (" << edges[i].source << "," << edges[i].target << ")";
  if (edges.size() > kShown) out << " ... (" << edges.size() << " total)";
  return out.str();
}

void sort_unique(std::vector<Edge>& edges) {
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

}  // namespace

Graph Graph::build(std::span<const Edge> edges, std::size_t num_vertices,
                   bool add_self_loops) {
  std::vector<Edge> sorted(edges.begin(), edges.end());
  for (const Edge& e : sorted) {
    if (e.source >= num_vertices || e.target >= num_vertices) {
      std::ostringstream msg;
      msg << "edge (" << e.source << "," << e.target << ") out of range for "
          << num_vertices << " vertices";
      throw GraphError(msg.str());
    }
  }
  if (add_self_loops) {
    sorted.reserve(sorted.size() + num_vertices);
    for (std::size_t v = 0; v < num_vertices; ++v)
      sorted.push_back({static_cast<VertexId>(v), static_cast<VertexId>(v)});
  }
  sort_unique(sorted);

  Graph g;
  g.num_vertices_ = num_vertices;
  g.out_offsets_.assign(num_vertices + 1, 0);
  g.out_targets_.resize(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    ++g.out_offsets_[sorted[i].source + 1];
    g.out_targets_[i] = sorted[i].target;
  }
  for (std::size_t v = 0; v < num_vertices; ++v)
    g.out_offsets_[v + 1] += g.out_offsets_[v];
  g.build_in_adjacency();
  return g;
}

void Graph::build_in_adjacency() {
  in_offsets_.assign(num_vertices_ + 1, 0);
  in_sources_.resize(out_targets_.size());
  for (VertexId v : out_targets_) ++in_offsets_[v + 1];
  for (std::size_t v = 0; v < num_vertices_; ++v) in_offsets_[v + 1] += in_offsets_[v];
  std::vector<std::uint64_t> cursor(in_offsets_.begin(), in_offsets_.end() - 1);
  // Sources are visited in increasing order, so each in-list comes out sorted.
  for (std::size_t u = 0; u < num_vertices_; ++u) {
    for (std::uint64_t i = out_offsets_[u]; i < out_offsets_[u + 1]; ++i)
      in_sources_[cursor[out_targets_[i]]++] = static_cast<VertexId>(u);
  }
}

bool Graph::has_edge(VertexId u, VertexId v) const noexcept {
  if (u >= num_vertices_ || v >= num_vertices_) return false;
  auto out = out_neighbors(u);
  return std::binary_search(out.begin(), out.end(), v);
}

bool Graph::has_all_self_loops() const noexcept {
  for (std::size_t v = 0; v < num_vertices_; ++v)
    if (!has_edge(static_cast<VertexId>(v), static_cast<VertexId>(v))) return false;
  return true;
}

std::size_t Graph::num_proper_edges() const noexcept {
  std::size_t loops = 0;
  for (std::size_t v = 0; v < num_vertices_; ++v)
    loops += has_edge(static_cast<VertexId>(v), static_cast<VertexId>(v)) ? 1 : 0;
  return num_edges() - loops;
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> result;
  result.reserve(num_edges());
  for (std::size_t u = 0; u < num_vertices_; ++u)
    for (VertexId v : out_neighbors(static_cast<VertexId>(u)))
      result.push_back({static_cast<VertexId>(u), v});
  return result;
}

Graph apply_batch(const Graph& prev, const BatchUpdate& batch) {
  const std::size_t n = prev.num_vertices();
  std::vector<Edge> dels = batch.deletions;
  std::vector<Edge> ins = batch.insertions;
  std::sort(dels.begin(), dels.end());
  std::sort(ins.begin(), ins.end());

  std::vector<Edge> bad;
  auto in_range = [n](const Edge& e) { return e.source < n && e.target < n; };
  for (const Edge& e : dels)
    if (!in_range(e)) bad.push_back(e);
  for (const Edge& e : ins)
    if (!in_range(e)) bad.push_back(e);
  if (!bad.empty()) throw BatchError(describe("vertex id out of range", bad), bad);

  for (std::size_t i = 0; i < dels.size(); ++i)
    if (dels[i].source == dels[i].target || !prev.has_edge(dels[i].source, dels[i].target) ||
        (i > 0 && dels[i] == dels[i - 1]))
      bad.push_back(dels[i]);
  if (!bad.empty())
    throw BatchError(describe("deletion of missing, repeated, or self-loop edge", bad), bad);

  for (std::size_t i = 0; i < ins.size(); ++i)
    if (prev.has_edge(ins[i].source, ins[i].target) || (i > 0 && ins[i] == ins[i - 1]))
      bad.push_back(ins[i]);
  if (!bad.empty())
    throw BatchError(describe("insertion of existing or repeated edge", bad), bad);

  std::set_intersection(dels.begin(), dels.end(), ins.begin(), ins.end(),
                        std::back_inserter(bad));
  if (!bad.empty()) throw BatchError(describe("edge both deleted and inserted", bad), bad);

  Graph g;
  g.num_vertices_ = n;
  g.out_offsets_.assign(n + 1, 0);
  g.out_targets_.reserve(prev.num_edges() + ins.size() - dels.size());
  auto d = dels.begin();
  auto a = ins.begin();
  std::vector<VertexId> kept, added;
  for (std::size_t u = 0; u < n; ++u) {
    const auto src = static_cast<VertexId>(u);
    auto out = prev.out_neighbors(src);
    if ((d == dels.end() || d->source != src) && (a == ins.end() || a->source != src)) {
      g.out_targets_.insert(g.out_targets_.end(), out.begin(), out.end());
    } else {
      kept.clear();
      for (VertexId v : out) {
        if (d != dels.end() && d->source == src && d->target == v) {
          ++d;
          continue;
        }
        kept.push_back(v);
      }
      added.clear();
      while (a != ins.end() && a->source == src) added.push_back((a++)->target);
      std::merge(kept.begin(), kept.end(), added.begin(), added.end(),
                 std::back_inserter(g.out_targets_));
    }
    g.out_offsets_[u + 1] = g.out_targets_.size();
  }
  g.build_in_adjacency();
  return g;
}

std::vector<VertexId> union_out_neighbors(const Graph& prev, const Graph& curr,
                                          VertexId u) {
  auto a = prev.out_neighbors(u);
  auto b = curr.out_neighbors(u);
  std::vector<VertexId> result;
  result.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(result));
  return result;
}

}  // namespace dynrank
