#include "dynrank/faults.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>

namespace dynrank {

namespace {

bool reached(const CrashPoint& point, Phase phase, std::size_t iteration, std::size_t position) {
  if (phase != point.phase) return phase == Phase::kRanking;  // marking precedes ranking
  if (iteration != point.iteration) return iteration > point.iteration;
  return position >= point.position;
}

std::mt19937_64 seeded(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

// Stream ids keep crash draws and per-worker delay draws independent.
constexpr std::uint64_t kCrashStream = 0xC0FFEE;

}  // namespace

void FaultPlan::validate(unsigned num_threads) const {
  if (!(delay_probability >= 0.0 && delay_probability <= 1.0))
    throw std::invalid_argument("delay probability must lie in [0, 1]");
  if (!(delay_ms >= 0.0) || !std::isfinite(delay_ms))
    throw std::invalid_argument("delay duration must be a non-negative number of milliseconds");
  if (crash_window_iterations < 1)
    throw std::invalid_argument("crash window must cover at least one iteration");
  if (num_threads < 1) throw std::invalid_argument("thread count must be at least 1");
  if (crash_points.empty()) {
    if (crash_count >= num_threads)
      throw std::invalid_argument("crash count " + std::to_string(crash_count) +
                                  " leaves no surviving worker out of " +
                                  std::to_string(num_threads));
    return;
  }
  std::vector<unsigned> crashed;
  for (const auto& point : crash_points) {
    if (point.worker >= num_threads)
      throw std::invalid_argument("crash point names worker " + std::to_string(point.worker) +
                                  " but only " + std::to_string(num_threads) + " run");
    crashed.push_back(point.worker);
  }
  std::sort(crashed.begin(), crashed.end());
  if (std::adjacent_find(crashed.begin(), crashed.end()) != crashed.end())
    throw std::invalid_argument("a worker has more than one crash point");
  if (crashed.size() >= num_threads)
    throw std::invalid_argument("crash points leave no surviving worker");
}

FaultInjector::FaultInjector(FaultPlan plan, unsigned num_workers, std::size_t num_vertices)
    : plan_(std::move(plan)), num_workers_(num_workers), workers_(num_workers) {
  plan_.validate(num_workers);
  if (!plan_.crash_points.empty()) {
    crash_points_ = plan_.crash_points;
  } else if (plan_.crash_count > 0) {
    auto rng = seeded(plan_.seed, kCrashStream);
    std::vector<unsigned> ids(num_workers);
    std::iota(ids.begin(), ids.end(), 0u);
    // Partial Fisher-Yates: the first crash_count entries are the victims.
    for (unsigned i = 0; i < plan_.crash_count; ++i) {
      std::uniform_int_distribution<unsigned> pick(i, num_workers - 1);
      std::swap(ids[i], ids[pick(rng)]);
    }
    std::uniform_int_distribution<std::size_t> iteration(0, plan_.crash_window_iterations - 1);
    std::uniform_int_distribution<std::size_t> position(0, num_vertices ? num_vertices - 1 : 0);
    for (unsigned i = 0; i < plan_.crash_count; ++i)
      crash_points_.push_back({ids[i], Phase::kRanking, iteration(rng), position(rng)});
  }
  reset();
}

void FaultInjector::reset() {
  for (unsigned w = 0; w < num_workers_; ++w) {
    WorkerState& st = workers_[w];
    st.rng = seeded(plan_.seed, w);
    st.delays = 0;
    st.delay_time = std::chrono::nanoseconds{0};
    st.crash = nullptr;
    st.crashed = false;
    st.countdown = draw_gap(st);
  }
  for (const auto& point : crash_points_) workers_[point.worker].crash = &point;
}

std::uint64_t FaultInjector::draw_gap(WorkerState& st) {
  if (plan_.delay_probability <= 0.0) return UINT64_MAX;
  if (plan_.delay_probability >= 1.0) return 0;
  // Failures before the next success: the same process as one Bernoulli
  // trial per vertex, with one draw per delay instead of one per vertex.
  return std::geometric_distribution<std::uint64_t>(plan_.delay_probability)(st.rng);
}

void FaultInjector::on_run_start(const FlagVectors&, std::size_t, unsigned num_workers) {
  if (num_workers != num_workers_)
    throw std::invalid_argument("fault injector built for " + std::to_string(num_workers_) +
                                " workers, engine runs " + std::to_string(num_workers));
  reset();
}

bool FaultInjector::on_chunk_claimed(unsigned worker, Phase phase, std::size_t iteration,
                                     std::size_t position) {
  WorkerState& st = workers_[worker];
  if (st.crashed) return false;
  if (st.crash && reached(*st.crash, phase, iteration, position)) {
    st.crashed = true;
    return false;
  }
  return true;
}

void FaultInjector::on_vertex_processed(unsigned worker, std::size_t, VertexId) {
  WorkerState& st = workers_[worker];
  if (st.countdown > 0) {
    if (st.countdown != UINT64_MAX) --st.countdown;
    return;
  }
  st.countdown = draw_gap(st);
  const auto duration = std::chrono::duration_cast<std::chrono::nanoseconds>(
      std::chrono::duration<double, std::milli>(plan_.delay_ms));
  ++st.delays;
  st.delay_time += duration;
  if (!plan_.virtual_clock) std::this_thread::sleep_for(duration);
}

std::uint64_t FaultInjector::delays() const noexcept {
  std::uint64_t total = 0;
  for (const auto& st : workers_) total += st.delays;
  return total;
}

std::chrono::nanoseconds FaultInjector::delay_time() const noexcept {
  std::chrono::nanoseconds total{0};
  for (const auto& st : workers_) total += st.delay_time;
  return total;
}

std::vector<std::uint64_t> FaultInjector::delays_per_worker() const {
  std::vector<std::uint64_t> out;
  for (const auto& st : workers_) out.push_back(st.delays);
  return out;
}

unsigned FaultInjector::crashes() const noexcept {
  unsigned total = 0;
  for (const auto& st : workers_) total += st.crashed ? 1 : 0;
  return total;
}

}  // namespace dynrank
