#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "dynrank/graph.hpp"

namespace dynrank {

enum class GraphFormat { kAuto, kMatrixMarket, kEdgeList, kTemporal };

std::string_view to_string(GraphFormat format) noexcept;
GraphFormat parse_graph_format(std::string_view text);

/// Edges as read from a file, in file order. Undirected MatrixMarket inputs
/// are already doubled into both directions.
struct EdgeStream {
  std::vector<Edge> edges;
  std::size_t num_vertices = 0;
  /// Set when rows carried a third (timestamp) column.
  bool temporal = false;
};

/// `%%MatrixMarket matrix coordinate <field> <symmetry>` with 1-based ids.
EdgeStream read_matrix_market(std::istream& in);

/// Whitespace separated `u v [timestamp]` rows; `#` and `%` start comments.
EdgeStream read_edge_list(std::istream& in);

/// Reads `path`. kAuto picks MatrixMarket when the first line starts with
/// "%%" or the path ends in .mtx, otherwise an edge list, which is temporal
/// when rows have a third column. kTemporal and kEdgeList force that flag.
EdgeStream load_edges(const std::string& path, GraphFormat format = GraphFormat::kAuto);

}  // namespace dynrank
