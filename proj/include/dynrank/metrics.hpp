#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dynrank/engines.hpp"

namespace dynrank {

/// Sequential synchronous power iteration from 1/n, run until a step changes
/// no entry at all in double precision or `max_iterations` steps have run.
RankVector reference_pagerank(const Graph& graph, double damping = 0.85,
                              std::size_t max_iterations = 500);

/// L∞ distance from `ranks` to reference_pagerank(graph, damping).
double error_vs_reference(std::span<const double> ranks, const Graph& graph,
                          double damping = 0.85);

struct ErrorReport {
  double linf_error = 0.0;
  double seconds = 0.0;
  std::size_t iterations = 0;
};

ErrorReport measure(const RunReport& run, std::span<const double> reference);

/// Deletes a random `fraction` of the edges of `graph` and updates ranks with
/// `engine`, then re-inserts the same edges and updates again. Returns the L∞
/// distance between the final ranks and those of the engine's static
/// counterpart on `graph`, which also seed the first update. An empty
/// deletion batch performs no update and returns 0.
double stability_roundtrip(const Graph& graph, double fraction, EngineId engine,
                           const PageRankConfig& cfg, std::uint64_t seed);

struct StabilityResult {
  double distance = 0.0;
  std::size_t deleted_edges = 0;
  RunReport removal;  // empty when nothing was deleted
  RunReport restore;
};

/// stability_roundtrip with both update runs kept.
StabilityResult stability_experiment(const Graph& graph, double fraction, EngineId engine,
                                     const PageRankConfig& cfg, std::uint64_t seed);

struct ScalingRow {
  unsigned threads = 1;
  double seconds = 0.0;
  double speedup = 1.0;
  double error = 0.0;
};

/// Runs `engine` on identical inputs once per thread count (averaging
/// `repetitions` timings). Speedup is relative to the 1-thread row when
/// present, else to the first row. Error is measured against `reference`.
std::vector<ScalingRow> scaling_sweep(const Graph& prev, const Graph& curr,
                                      const BatchUpdate& batch,
                                      std::span<const double> prev_ranks, EngineId engine,
                                      PageRankConfig cfg, std::span<const unsigned> thread_counts,
                                      std::span<const double> reference,
                                      unsigned repetitions = 1);

void write_scaling_csv(std::ostream& out, std::span<const ScalingRow> rows);

/// Throws std::invalid_argument when empty or any value is not positive.
double geometric_mean(std::span<const double> values);

/// One row of the experiment report. `extra` holds additional named columns
/// (e.g. fault parameters) appended after the fixed ones, in order.
struct ReportRow {
  std::string graph;
  std::string engine;
  double batch_fraction = 0.0;
  unsigned threads = 1;
  std::uint64_t seed = 0;
  std::size_t iterations = 0;
  double seconds = 0.0;
  double error = 0.0;
  std::size_t affected_initial = 0;
  std::size_t affected_total = 0;
  bool converged = false;
  std::vector<std::pair<std::string, std::string>> extra;

  bool operator==(const ReportRow&) const = default;
};

inline constexpr const char* kReportHeader =
    "graph,engine,batch_fraction,threads,seed,iterations,seconds,error,affected_initial,"
    "affected_total,converged";

/// Writes the header (fixed columns plus the extra columns of the first row)
/// and one line per row. Every row must carry the same extra column names.
void write_report_csv(std::ostream& out, std::span<const ReportRow> rows);
std::vector<ReportRow> read_report_csv(std::istream& in);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

}  // namespace dynrank
