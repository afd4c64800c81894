#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "dynrank/graph.hpp"

namespace dynrank {

/// Per-vertex 8-bit flags shared by the workers of one engine run:
///   affected      - rank must be recomputed for this batch (V_A)
///   checked       - batch source whose out-neighbors have been marked (C)
///   not_converged - rank has not settled yet (R_C)
///
/// Every access is an indivisible byte load or store. Concurrent writers only
/// ever store the same value, so duplicate writes are harmless.
class FlagVectors {
 public:
  explicit FlagVectors(std::size_t n = 0)
      : affected_(n, 0), checked_(n, 0), not_converged_(n, 0) {}

  std::size_t size() const noexcept { return affected_.size(); }

  bool affected(VertexId v) const noexcept { return load(affected_[v]); }
  void mark_affected(VertexId v) noexcept { raise(affected_[v]); }

  bool checked(VertexId u) const noexcept { return load(checked_[u]); }
  void mark_checked(VertexId u) noexcept { raise(checked_[u]); }

  template <std::memory_order Order = std::memory_order_relaxed>
  bool not_converged(VertexId v) const noexcept {
    return load<Order>(not_converged_[v]);
  }
  template <std::memory_order Order = std::memory_order_relaxed>
  void set_not_converged(VertexId v) noexcept {
    raise<Order>(not_converged_[v]);
  }
  template <std::memory_order Order = std::memory_order_relaxed>
  void clear_not_converged(VertexId v) noexcept {
    store<Order>(not_converged_[v], 0);
  }
  void set_all_not_converged() noexcept {
    for (auto& f : not_converged_) store(f, 1);
  }

  /// True when no vertex is flagged not-converged.
  bool all_converged() const noexcept {
    for (auto& f : not_converged_)
      if (load(f)) return false;
    return true;
  }

  std::size_t count_affected() const noexcept {
    std::size_t count = 0;
    for (auto& f : affected_) count += load(f) ? 1 : 0;
    return count;
  }

  std::vector<VertexId> affected_vertices() const {
    std::vector<VertexId> out;
    for (std::size_t v = 0; v < affected_.size(); ++v)
      if (load(affected_[v])) out.push_back(static_cast<VertexId>(v));
    return out;
  }

  /// Plain copy of the affected flags; only valid once workers have stopped.
  std::vector<std::uint8_t> affected_snapshot() const { return affected_; }

 private:
  template <std::memory_order Order = std::memory_order_relaxed>
  static bool load(std::uint8_t& f) noexcept {
    return std::atomic_ref<std::uint8_t>(f).load(Order) != 0;
  }
  template <std::memory_order Order = std::memory_order_relaxed>
  static void store(std::uint8_t& f, std::uint8_t value) noexcept {
    std::atomic_ref<std::uint8_t>(f).store(value, Order);
  }
  // Skips the store when already set, keeping the cache line shared.
  template <std::memory_order Order = std::memory_order_relaxed>
  static void raise(std::uint8_t& f) noexcept {
    if (!load<Order>(f)) store<Order>(f, 1);
  }

  mutable std::vector<std::uint8_t> affected_;
  mutable std::vector<std::uint8_t> checked_;
  mutable std::vector<std::uint8_t> not_converged_;
};

}  // namespace dynrank
