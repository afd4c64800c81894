#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dynrank {

using VertexId = std::uint32_t;

struct Edge {
  VertexId source = 0;
  VertexId target = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Raised when a graph cannot be constructed from the given edges.
class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by text readers; `line()` is 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& detail, std::size_t line, const std::string& source = {})
      : std::runtime_error(format(detail, line, source)), detail_(detail), line_(line) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  static std::string format(const std::string& detail, std::size_t line,
                            const std::string& source) {
    std::string out = source.empty() ? std::string() : source + ":";
    if (line) out += "line " + std::to_string(line) + ":";
    return out.empty() ? detail : out + " " + detail;
  }

  std::string detail_;
  std::size_t line_;
};

/// Raised when a batch does not apply cleanly to a snapshot. Carries the
/// offending edges so callers can report them.
class BatchError : public std::runtime_error {
 public:
  BatchError(const std::string& what, std::vector<Edge> offending)
      : std::runtime_error(what), offending_(std::move(offending)) {}

  const std::vector<Edge>& offending() const noexcept { return offending_; }

 private:
  std::vector<Edge> offending_;
};

/// Edge deletions and insertions turning one snapshot into the next.
struct BatchUpdate {
  std::vector<Edge> deletions;
  std::vector<Edge> insertions;

  bool empty() const noexcept { return deletions.empty() && insertions.empty(); }
  std::size_t size() const noexcept { return deletions.size() + insertions.size(); }

  /// The batch that undoes this one.
  BatchUpdate inverse() const { return {insertions, deletions}; }

  friend bool operator==(const BatchUpdate&, const BatchUpdate&) = default;
};

/// Immutable directed graph snapshot in CSR form, storing both out- and
/// in-adjacency. Adjacency lists are sorted and duplicate free.
class Graph {
 public:
  Graph() = default;

  /// Builds a snapshot from an edge list. Duplicate edges are dropped. With
  /// `add_self_loops` every vertex receives (v,v), so no vertex is a dead end.
  static Graph build(std::span<const Edge> edges, std::size_t num_vertices,
                     bool add_self_loops);

  std::size_t num_vertices() const noexcept { return num_vertices_; }
  std::size_t num_edges() const noexcept { return out_targets_.size(); }

  std::span<const VertexId> out_neighbors(VertexId u) const noexcept {
    return {out_targets_.data() + out_offsets_[u],
            out_targets_.data() + out_offsets_[u + 1]};
  }
  std::span<const VertexId> in_neighbors(VertexId v) const noexcept {
    return {in_sources_.data() + in_offsets_[v],
            in_sources_.data() + in_offsets_[v + 1]};
  }
  std::size_t out_degree(VertexId u) const noexcept {
    return out_offsets_[u + 1] - out_offsets_[u];
  }
  std::size_t in_degree(VertexId v) const noexcept {
    return in_offsets_[v + 1] - in_offsets_[v];
  }

  bool has_edge(VertexId u, VertexId v) const noexcept;

  /// True if every vertex carries a self-loop.
  bool has_all_self_loops() const noexcept;

  /// Number of edges (u,v) with u != v.
  std::size_t num_proper_edges() const noexcept;

  /// All edges in (source, target) order.
  std::vector<Edge> edges() const;

  friend bool operator==(const Graph& a, const Graph& b) noexcept {
    return a.num_vertices_ == b.num_vertices_ && a.out_offsets_ == b.out_offsets_ &&
           a.out_targets_ == b.out_targets_;
  }

 private:
  friend Graph apply_batch(const Graph&, const BatchUpdate&);

  // Fills in-adjacency from out-adjacency with a counting sort.
  void build_in_adjacency();

  std::size_t num_vertices_ = 0;
  std::vector<std::uint64_t> out_offsets_{0};
  std::vector<VertexId> out_targets_;
  std::vector<std::uint64_t> in_offsets_{0};
  std::vector<VertexId> in_sources_;
};

/// Returns the snapshot with (E \ deletions) ∪ insertions. The input graph is
/// untouched. Throws BatchError if a deletion is missing, an insertion already
/// exists, a self-loop is deleted, an edge appears in both lists, or an id is
/// out of range.
Graph apply_batch(const Graph& prev, const BatchUpdate& batch);

/// Sorted union of u's out-neighbors in both snapshots.
std::vector<VertexId> union_out_neighbors(const Graph& prev, const Graph& curr,
                                          VertexId u);

}  // namespace dynrank
