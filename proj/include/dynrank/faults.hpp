#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "dynrank/observer.hpp"

namespace dynrank {

/// Worker `worker` stops at its first chunk claim at or after
/// (phase, iteration, position), in that lexicographic order.
struct CrashPoint {
  unsigned worker = 0;
  Phase phase = Phase::kRanking;
  std::size_t iteration = 0;
  std::size_t position = 0;

  bool operator==(const CrashPoint&) const = default;
};

struct FaultPlan {
  /// Probability of a delay after each vertex rank computation. Over one
  /// sweep of |V| vertices this gives delay_probability * |V| delays on
  /// average.
  double delay_probability = 0.0;
  double delay_ms = 100.0;
  /// Workers to crash, chosen at random; ignored when crash_points is set.
  unsigned crash_count = 0;
  /// Random crash points fall uniformly in the first this-many iterations.
  std::size_t crash_window_iterations = 4;
  std::uint64_t seed = 0;
  /// Record delays without sleeping.
  bool virtual_clock = false;
  std::vector<CrashPoint> crash_points;

  /// Throws std::invalid_argument if the plan cannot run on `num_threads`
  /// workers, e.g. when no worker would survive.
  void validate(unsigned num_threads) const;
};

/// Worker observer that delays and crash-stops workers according to a plan.
/// Crash points are fixed at construction; every run replays them, and delay
/// draws restart from the seed at each run start.
class FaultInjector final : public WorkerObserver {
 public:
  FaultInjector(FaultPlan plan, unsigned num_workers, std::size_t num_vertices);

  const FaultPlan& plan() const noexcept { return plan_; }
  const std::vector<CrashPoint>& crash_points() const noexcept { return crash_points_; }

  // Statistics for the most recent run; read only after it has finished.
  std::uint64_t delays() const noexcept;
  std::chrono::nanoseconds delay_time() const noexcept;
  std::vector<std::uint64_t> delays_per_worker() const;
  unsigned crashes() const noexcept;

  void on_run_start(const FlagVectors& flags, std::size_t num_vertices,
                    unsigned num_workers) override;
  bool on_chunk_claimed(unsigned worker, Phase phase, std::size_t iteration,
                        std::size_t position) override;
  void on_vertex_processed(unsigned worker, std::size_t iteration, VertexId v) override;

 private:
  struct alignas(64) WorkerState {
    std::mt19937_64 rng;
    std::uint64_t countdown = 0;  // vertices left before the next delay
    std::uint64_t delays = 0;
    std::chrono::nanoseconds delay_time{0};
    const CrashPoint* crash = nullptr;
    bool crashed = false;
  };

  void reset();
  std::uint64_t draw_gap(WorkerState& st);

  FaultPlan plan_;
  unsigned num_workers_;
  std::vector<CrashPoint> crash_points_;
  std::vector<WorkerState> workers_;
};

}  // namespace dynrank
