#pragma once

#include <cstddef>
#include <cstdint>

#include "dynrank/flags.hpp"
#include "dynrank/graph.hpp"

namespace dynrank {

enum class Phase : std::uint8_t {
  kMarking,  // initial marking of affected vertices from the batch
  kRanking,  // rank iterations
};

/// Event hooks invoked by engine workers. All callbacks run on worker threads,
/// concurrently across workers; a given worker id is only ever used by one
/// thread within a run. Default implementations do nothing.
class WorkerObserver {
 public:
  virtual ~WorkerObserver() = default;

  /// Before any worker starts. `flags` stays valid until on_run_end().
  virtual void on_run_start(const FlagVectors& flags, std::size_t num_vertices,
                            unsigned num_workers) {
    (void)flags, (void)num_vertices, (void)num_workers;
  }

  virtual void on_phase_entered(unsigned worker, Phase phase) { (void)worker, (void)phase; }

  /// After every claim attempt on a work pool. `position` is the first index
  /// of the claimed range, or the pool size when nothing was left. Returning
  /// false crash-stops the worker: it abandons the claimed range and exits.
  virtual bool on_chunk_claimed(unsigned worker, Phase phase, std::size_t iteration,
                                std::size_t position) {
    (void)worker, (void)phase, (void)iteration, (void)position;
    return true;
  }

  /// After each rank computation.
  virtual void on_vertex_processed(unsigned worker, std::size_t iteration, VertexId v) {
    (void)worker, (void)iteration, (void)v;
  }

  /// After all workers have stopped.
  virtual void on_run_end() {}
};

}  // namespace dynrank
