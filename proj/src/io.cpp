#include "dynrank/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <stdexcept>

namespace dynrank {

namespace {

bool is_comment_or_blank(std::string_view line) {
  const auto first = line.find_first_not_of(" \t\r");
  return first == std::string_view::npos || line[first] == '%' || line[first] == '#';
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r' ||
                               line[i] == ','))
      ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r' &&
           line[i] != ',')
      ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

std::uint64_t parse_id(std::string_view field, std::size_t line_no) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw ParseError("invalid vertex id '" + std::string(field) + "'", line_no);
  return value;
}

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::string_view to_string(GraphFormat format) noexcept {
  switch (format) {
    case GraphFormat::kAuto: return "auto";
    case GraphFormat::kMatrixMarket: return "mtx";
    case GraphFormat::kEdgeList: return "edgelist";
    case GraphFormat::kTemporal: return "temporal";
  }
  return "unknown";
}

GraphFormat parse_graph_format(std::string_view text) {
  for (GraphFormat f : {GraphFormat::kAuto, GraphFormat::kMatrixMarket,
                        GraphFormat::kEdgeList, GraphFormat::kTemporal})
    if (to_string(f) == text) return f;
  throw std::invalid_argument("unknown graph format '" + std::string(text) +
                              "' (expected auto, mtx, edgelist, temporal)");
}

EdgeStream read_matrix_market(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError("empty MatrixMarket input", 1);
  const std::string banner_line = lower(line);
  const auto banner = split_fields(banner_line);
  if (banner.size() < 4 || banner[0] != "%%matrixmarket" || banner[1] != "matrix" ||
      banner[2] != "coordinate")
    throw ParseError("expected '%%MatrixMarket matrix coordinate' header", line_no);
  const std::string symmetry = banner.size() >= 5 ? std::string(banner[4]) : "general";
  const bool symmetric = symmetry == "symmetric" || symmetry == "skew-symmetric" ||
                         symmetry == "hermitian";

  EdgeStream result;
  bool have_size = false;
  std::uint64_t rows = 0, cols = 0, entries = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_comment_or_blank(line)) continue;
    const auto fields = split_fields(line);
    if (!have_size) {
      if (fields.size() != 3) throw ParseError("expected 'rows cols entries' size line", line_no);
      rows = parse_id(fields[0], line_no);
      cols = parse_id(fields[1], line_no);
      entries = parse_id(fields[2], line_no);
      result.num_vertices = static_cast<std::size_t>(std::max(rows, cols));
      result.edges.reserve(symmetric ? 2 * entries : entries);
      have_size = true;
      continue;
    }
    if (fields.size() < 2) throw ParseError("expected 'row col [value]' entry", line_no);
    const std::uint64_t u = parse_id(fields[0], line_no);
    const std::uint64_t v = parse_id(fields[1], line_no);
    if (u == 0 || v == 0 || u > result.num_vertices || v > result.num_vertices)
      throw ParseError("entry index out of range (ids are 1-based)", line_no);
    const Edge e{static_cast<VertexId>(u - 1), static_cast<VertexId>(v - 1)};
    result.edges.push_back(e);
    if (symmetric && e.source != e.target) result.edges.push_back({e.target, e.source});
  }
  if (!have_size) throw ParseError("missing size line", line_no);
  return result;
}

EdgeStream read_edge_list(std::istream& in) {
  EdgeStream result;
  std::string line;
  std::size_t line_no = 0;
  std::uint64_t max_id = 0;
  bool any = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_comment_or_blank(line)) continue;
    const auto fields = split_fields(line);
    if (fields.size() < 2 || fields.size() > 4)
      throw ParseError("expected 'u v [timestamp]'", line_no);
    const std::uint64_t u = parse_id(fields[0], line_no);
    const std::uint64_t v = parse_id(fields[1], line_no);
    if (u > UINT32_MAX - 1 || v > UINT32_MAX - 1)
      throw ParseError("vertex id exceeds 32-bit range", line_no);
    if (!any) result.temporal = fields.size() >= 3;
    any = true;
    max_id = std::max({max_id, u, v});
    result.edges.push_back({static_cast<VertexId>(u), static_cast<VertexId>(v)});
  }
  result.num_vertices = any ? static_cast<std::size_t>(max_id) + 1 : 0;
  return result;
}

EdgeStream load_edges(const std::string& path, GraphFormat format) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file '" + path + "'");
  const GraphFormat requested = format;
  if (format == GraphFormat::kAuto) {
    std::string first;
    std::getline(in, first);
    const bool mtx_suffix = path.size() >= 4 && lower(path.substr(path.size() - 4)) == ".mtx";
    format = first.rfind("%%", 0) == 0 || mtx_suffix ? GraphFormat::kMatrixMarket
                                                     : GraphFormat::kEdgeList;
    in.clear();
    in.seekg(0);
  }
  EdgeStream stream;
  try {
    stream = format == GraphFormat::kMatrixMarket ? read_matrix_market(in) : read_edge_list(in);
  } catch (const ParseError& e) {
    throw ParseError(e.detail(), e.line(), path);
  }
  if (requested == GraphFormat::kTemporal) stream.temporal = true;
  if (requested == GraphFormat::kEdgeList) stream.temporal = false;
  return stream;
}

}  // namespace dynrank
