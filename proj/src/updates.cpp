#include "dynrank/updates.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <unordered_set>

namespace dynrank {

namespace {

std::uint64_t key_of(VertexId u, VertexId v) {
  return (static_cast<std::uint64_t>(u) << 32) | v;
}

std::vector<Edge> sample_deletions(const Graph& graph, std::size_t count,
                                   std::mt19937_64& rng) {
  std::vector<Edge> pool;
  pool.reserve(graph.num_proper_edges());
  for (const Edge& e : graph.edges())
    if (e.source != e.target) pool.push_back(e);
  if (count > pool.size()) {
    throw GenerationError("requested " + std::to_string(count) + " deletions but only " +
                          std::to_string(pool.size()) + " non-loop edges exist");
  }
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(count);
  return pool;
}

std::vector<Edge> sample_insertions(const Graph& graph, std::size_t count,
                                    std::mt19937_64& rng) {
  const std::size_t n = graph.num_vertices();
  if (count == 0) return {};
  const double pairs = static_cast<double>(n) * static_cast<double>(n - (n > 0 ? 1 : 0));
  const std::size_t proper = graph.num_proper_edges();
  const double available = pairs - static_cast<double>(proper);
  if (static_cast<double>(count) > available) {
    throw GenerationError("requested " + std::to_string(count) +
                          " insertions but only " + std::to_string(available) +
                          " non-adjacent pairs exist");
  }

  std::vector<Edge> result;
  result.reserve(count);
  if (static_cast<double>(proper) > 0.5 * pairs) {
    std::vector<Edge> pool;
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = 0; v < n; ++v)
        if (u != v && !graph.has_edge(static_cast<VertexId>(u), static_cast<VertexId>(v)))
          pool.push_back({static_cast<VertexId>(u), static_cast<VertexId>(v)});
    for (std::size_t i = 0; i < count; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
      std::swap(pool[i], pool[pick(rng)]);
    }
    pool.resize(count);
    return pool;
  }

  std::unordered_set<std::uint64_t> chosen;
  std::uniform_int_distribution<VertexId> vertex(0, static_cast<VertexId>(n - 1));
  while (result.size() < count) {
    const VertexId u = vertex(rng);
    const VertexId v = vertex(rng);
    if (u == v || graph.has_edge(u, v)) continue;
    if (!chosen.insert(key_of(u, v)).second) continue;
    result.push_back({u, v});
  }
  return result;
}

}  // namespace

std::string_view to_string(BatchMode mode) noexcept {
  switch (mode) {
    case BatchMode::kRandomMixed: return "random-mixed";
    case BatchMode::kRandomDeletions: return "random-deletions-only";
    case BatchMode::kRandomInsertions: return "random-insertions-only";
    case BatchMode::kTemporalReplay: return "temporal-replay";
  }
  return "unknown";
}

BatchMode parse_batch_mode(std::string_view text) {
  for (BatchMode m : {BatchMode::kRandomMixed, BatchMode::kRandomDeletions,
                      BatchMode::kRandomInsertions, BatchMode::kTemporalReplay})
    if (to_string(m) == text) return m;
  throw std::invalid_argument(
      "unknown batch mode '" + std::string(text) +
      "' (expected random-mixed, random-deletions-only, random-insertions-only, "
      "temporal-replay)");
}

void BatchSpec::validate() const {
  // Zero is accepted and yields an empty batch.
  if (!(size_fraction >= 0.0 && size_fraction <= 1.0))
    throw std::invalid_argument("batch size fraction must lie in [0, 1]");
  if (!(initial_load_fraction > 0.0 && initial_load_fraction < 1.0))
    throw std::invalid_argument("initial load fraction must lie in (0, 1)");
}

BatchUpdate generate_random_batch(const Graph& graph, const BatchSpec& spec) {
  spec.validate();
  if (spec.mode == BatchMode::kTemporalReplay)
    throw std::invalid_argument("temporal replay is not a random batch mode");

  const auto total = static_cast<std::size_t>(
      std::llround(spec.size_fraction * static_cast<double>(graph.num_proper_edges())));
  std::size_t num_deletions = 0;
  std::size_t num_insertions = 0;
  switch (spec.mode) {
    case BatchMode::kRandomMixed:
      num_deletions = (total + 1) / 2;
      num_insertions = total / 2;
      break;
    case BatchMode::kRandomDeletions: num_deletions = total; break;
    case BatchMode::kRandomInsertions: num_insertions = total; break;
    case BatchMode::kTemporalReplay: break;
  }

  std::mt19937_64 rng(spec.rng_seed);
  BatchUpdate batch;
  batch.deletions = sample_deletions(graph, num_deletions, rng);
  batch.insertions = sample_insertions(graph, num_insertions, rng);
  return batch;
}

TemporalReplay temporal_batches(std::span<const Edge> stream, const BatchSpec& spec) {
  spec.validate();
  if (stream.empty()) throw GenerationError("temporal edge stream is empty");

  VertexId max_id = 0;
  for (const Edge& e : stream) max_id = std::max({max_id, e.source, e.target});
  const std::size_t n = static_cast<std::size_t>(max_id) + 1;

  const auto initial_count = static_cast<std::size_t>(
      std::floor(spec.initial_load_fraction * static_cast<double>(stream.size())));
  const std::size_t batch_size = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::llround(spec.size_fraction * static_cast<double>(stream.size()))));

  TemporalReplay replay;
  replay.initial = Graph::build(stream.first(initial_count), n, true);

  std::unordered_set<std::uint64_t> present;
  present.reserve(replay.initial.num_edges() * 2);
  for (const Edge& e : replay.initial.edges()) present.insert(key_of(e.source, e.target));

  for (std::size_t begin = initial_count; begin < stream.size(); begin += batch_size) {
    const std::size_t end = std::min(stream.size(), begin + batch_size);
    BatchUpdate batch;
    for (std::size_t i = begin; i < end; ++i) {
      const Edge& e = stream[i];
      if (e.source == e.target) continue;
      if (present.insert(key_of(e.source, e.target)).second) batch.insertions.push_back(e);
    }
    replay.batches.push_back(std::move(batch));
  }
  return replay;
}

void write_batch_csv(std::ostream& out, const BatchUpdate& batch) {
  out << "op,u,v\n";
  for (const Edge& e : batch.deletions) out << "D," << e.source << ',' << e.target << '\n';
  for (const Edge& e : batch.insertions) out << "I," << e.source << ',' << e.target << '\n';
}

BatchUpdate read_batch_csv(std::istream& in) {
  BatchUpdate batch;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line == "op,u,v") continue;
    std::istringstream fields(line);
    std::string op, u, v;
    if (!std::getline(fields, op, ',') || !std::getline(fields, u, ',') ||
        !std::getline(fields, v))
      throw ParseError("expected 'op,u,v', got '" + line + "'", line_no);
    Edge e;
    try {
      std::size_t used_u = 0, used_v = 0;
      const unsigned long su = std::stoul(u, &used_u);
      const unsigned long sv = std::stoul(v, &used_v);
      if (used_u != u.size() || used_v != v.size() || su > UINT32_MAX || sv > UINT32_MAX)
        throw std::invalid_argument("bad id");
      e = {static_cast<VertexId>(su), static_cast<VertexId>(sv)};
    } catch (const std::exception&) {
      throw ParseError("invalid vertex id in '" + line + "'", line_no);
    }
    if (op == "D") {
      batch.deletions.push_back(e);
    } else if (op == "I") {
      batch.insertions.push_back(e);
    } else {
      throw ParseError("unknown op '" + op + "' (expected D or I)", line_no);
    }
  }
  return batch;
}

}  // namespace dynrank
