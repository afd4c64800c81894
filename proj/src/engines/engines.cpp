#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "internal.hpp"

namespace dynrank {

namespace {

constexpr std::array kEngines = {
    EngineId::kStaticBB,    EngineId::kStaticLF,    EngineId::kNaiveDynamicBB,
    EngineId::kNaiveDynamicLF, EngineId::kTraversalBB, EngineId::kTraversalLF,
    EngineId::kFrontierBB,  EngineId::kFrontierLF,
};

void check_graph(const Graph& g) {
  if (g.num_vertices() == 0) throw std::invalid_argument("graph has no vertices");
}

void check_prev_ranks(const Graph& g, std::span<const double> prev_ranks) {
  if (prev_ranks.size() != g.num_vertices())
    throw std::invalid_argument("previous rank vector has " + std::to_string(prev_ranks.size()) +
                                " entries, graph has " + std::to_string(g.num_vertices()) +
                                " vertices");
}

void check_snapshots(const Graph& prev, const Graph& curr, const BatchUpdate& batch) {
  if (prev.num_vertices() != curr.num_vertices())
    throw std::invalid_argument("previous and current snapshots differ in vertex count");
  const std::size_t n = curr.num_vertices();
  for (const auto* list : {&batch.deletions, &batch.insertions})
    for (const Edge& e : *list)
      if (e.source >= n || e.target >= n)
        throw std::invalid_argument("batch edge (" + std::to_string(e.source) + "," +
                                    std::to_string(e.target) + ") is out of range");
}

RunReport run(detail::Variant variant, bool lock_free, const Graph* prev, const Graph& curr,
              const BatchUpdate* batch, std::span<const double> prev_ranks,
              const PageRankConfig& cfg, const RunOptions& opts) {
  cfg.validate();
  check_graph(curr);
  if (variant != detail::Variant::kStatic) check_prev_ranks(curr, prev_ranks);
  if (detail::needs_marking(variant)) check_snapshots(*prev, curr, *batch);
  const detail::Problem problem{variant, prev, curr, batch, prev_ranks};
  return lock_free ? detail::run_lock_free(problem, cfg, opts)
                   : detail::run_barrier_based(problem, cfg, opts);
}

}  // namespace

std::string_view to_string(EngineId id) noexcept {
  switch (id) {
    case EngineId::kStaticBB: return "static-bb";
    case EngineId::kStaticLF: return "static-lf";
    case EngineId::kNaiveDynamicBB: return "nd-bb";
    case EngineId::kNaiveDynamicLF: return "nd-lf";
    case EngineId::kTraversalBB: return "dt-bb";
    case EngineId::kTraversalLF: return "dt-lf";
    case EngineId::kFrontierBB: return "df-bb";
    case EngineId::kFrontierLF: return "df-lf";
  }
  return "unknown";
}

EngineId parse_engine_id(std::string_view text) {
  std::string valid;
  for (EngineId id : kEngines) {
    if (to_string(id) == text) return id;
    valid += valid.empty() ? "" : ", ";
    valid += to_string(id);
  }
  throw std::invalid_argument("unknown engine '" + std::string(text) + "' (valid: " + valid + ")");
}

std::span<const EngineId> all_engines() noexcept { return kEngines; }

bool is_lock_free(EngineId id) noexcept {
  return id == EngineId::kStaticLF || id == EngineId::kNaiveDynamicLF ||
         id == EngineId::kTraversalLF || id == EngineId::kFrontierLF;
}

EngineId static_counterpart(EngineId id) noexcept {
  return is_lock_free(id) ? EngineId::kStaticLF : EngineId::kStaticBB;
}

void PageRankConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument(what); };
  if (!(damping > 0.0 && damping < 1.0)) fail("damping must lie in (0, 1)");
  if (!(iteration_tolerance > 0.0)) fail("iteration tolerance must be positive");
  const double tf = effective_frontier_tolerance();
  if (std::isnan(tf) || tf < 0.0) fail("frontier tolerance must be non-negative");
  if (frontier_tolerance && !std::isinf(tf) && tf > iteration_tolerance)
    fail("frontier tolerance must not exceed the iteration tolerance");
  if (max_iterations < 1) fail("max iterations must be at least 1");
  if (chunk_size < 1) fail("chunk size must be at least 1");
  if (num_threads < 1) fail("thread count must be at least 1");
}

std::string_view to_string(RunStatus status) noexcept {
  switch (status) {
    case RunStatus::kConverged: return "converged";
    case RunStatus::kIterationLimit: return "iteration-limit";
    case RunStatus::kAborted: return "aborted";
  }
  return "unknown";
}

using detail::Variant;

RunReport static_bb(const Graph& graph, const PageRankConfig& cfg, const RunOptions& opts) {
  return run(Variant::kStatic, false, nullptr, graph, nullptr, {}, cfg, opts);
}

RunReport static_lf(const Graph& graph, const PageRankConfig& cfg, const RunOptions& opts) {
  return run(Variant::kStatic, true, nullptr, graph, nullptr, {}, cfg, opts);
}

RunReport nd_bb(const Graph& curr, std::span<const double> prev_ranks, const PageRankConfig& cfg,
                const RunOptions& opts) {
  return run(Variant::kNaiveDynamic, false, nullptr, curr, nullptr, prev_ranks, cfg, opts);
}

RunReport nd_lf(const Graph& curr, std::span<const double> prev_ranks, const PageRankConfig& cfg,
                const RunOptions& opts) {
  return run(Variant::kNaiveDynamic, true, nullptr, curr, nullptr, prev_ranks, cfg, opts);
}

RunReport dt_bb(const Graph& prev, const Graph& curr, const BatchUpdate& batch,
                std::span<const double> prev_ranks, const PageRankConfig& cfg,
                const RunOptions& opts) {
  return run(Variant::kTraversal, false, &prev, curr, &batch, prev_ranks, cfg, opts);
}

RunReport dt_lf(const Graph& prev, const Graph& curr, const BatchUpdate& batch,
                std::span<const double> prev_ranks, const PageRankConfig& cfg,
                const RunOptions& opts) {
  return run(Variant::kTraversal, true, &prev, curr, &batch, prev_ranks, cfg, opts);
}

RunReport df_bb(const Graph& prev, const Graph& curr, const BatchUpdate& batch,
                std::span<const double> prev_ranks, const PageRankConfig& cfg,
                const RunOptions& opts) {
  return run(Variant::kFrontier, false, &prev, curr, &batch, prev_ranks, cfg, opts);
}

RunReport df_lf(const Graph& prev, const Graph& curr, const BatchUpdate& batch,
                std::span<const double> prev_ranks, const PageRankConfig& cfg,
                const RunOptions& opts) {
  return run(Variant::kFrontier, true, &prev, curr, &batch, prev_ranks, cfg, opts);
}

RunReport run_engine(EngineId id, const Graph& prev, const Graph& curr, const BatchUpdate& batch,
                     std::span<const double> prev_ranks, const PageRankConfig& cfg,
                     const RunOptions& opts) {
  switch (id) {
    case EngineId::kStaticBB: return static_bb(curr, cfg, opts);
    case EngineId::kStaticLF: return static_lf(curr, cfg, opts);
    case EngineId::kNaiveDynamicBB: return nd_bb(curr, prev_ranks, cfg, opts);
    case EngineId::kNaiveDynamicLF: return nd_lf(curr, prev_ranks, cfg, opts);
    case EngineId::kTraversalBB: return dt_bb(prev, curr, batch, prev_ranks, cfg, opts);
    case EngineId::kTraversalLF: return dt_lf(prev, curr, batch, prev_ranks, cfg, opts);
    case EngineId::kFrontierBB: return df_bb(prev, curr, batch, prev_ranks, cfg, opts);
    case EngineId::kFrontierLF: return df_lf(prev, curr, batch, prev_ranks, cfg, opts);
  }
  throw std::invalid_argument("unknown engine id");
}

}  // namespace dynrank
