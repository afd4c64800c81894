#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <span>
#include <string_view>
#include <vector>

#include "dynrank/graph.hpp"

namespace dynrank {

enum class BatchMode {
  kRandomMixed,
  kRandomDeletions,
  kRandomInsertions,
  kTemporalReplay,
};

std::string_view to_string(BatchMode mode) noexcept;
BatchMode parse_batch_mode(std::string_view text);

struct BatchSpec {
  /// Fraction of |E| (random modes) or of the stream length (temporal replay).
  double size_fraction = 1e-4;
  BatchMode mode = BatchMode::kRandomMixed;
  std::uint64_t rng_seed = 0;
  /// Share of the temporal stream loaded before replay starts.
  double initial_load_fraction = 0.9;

  void validate() const;
};

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Random batch on `graph`. The edge total is round(size_fraction * E'), where
/// E' counts edges other than self-loops. In mixed mode deletions get the odd
/// edge. Deletions are drawn uniformly without replacement from existing
/// non-loop edges; insertions are distinct, uniformly drawn, non-adjacent
/// vertex pairs with u != v.
BatchUpdate generate_random_batch(const Graph& graph, const BatchSpec& spec);

struct TemporalReplay {
  Graph initial;
  std::vector<BatchUpdate> batches;
};

/// Splits an ordered edge stream into an initial snapshot and insertion-only
/// batches. Entries already present in the evolving graph, repeated within a
/// batch, or self-loops are dropped, so every batch applies cleanly in order.
/// The vertex set is sized by the largest id in the whole stream.
TemporalReplay temporal_batches(std::span<const Edge> stream, const BatchSpec& spec);

/// `op,u,v` CSV with op D (deletion) or I (insertion).
void write_batch_csv(std::ostream& out, const BatchUpdate& batch);
BatchUpdate read_batch_csv(std::istream& in);

}  // namespace dynrank
