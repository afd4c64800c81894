#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "dynrank/engines.hpp"
#include "dynrank/faults.hpp"
#include "dynrank/io.hpp"
#include "dynrank/updates.hpp"

namespace dynrank::cli {

/// Everything an experiment needs. Defaults come first, then a JSON config
/// file, then command-line flags.
struct ExperimentConfig {
  std::string graph;
  GraphFormat format = GraphFormat::kAuto;
  EngineId engine = EngineId::kFrontierLF;
  PageRankConfig pagerank;
  BatchSpec batch;
  /// One batch set per fraction; batch.size_fraction is ignored.
  std::vector<double> batch_fractions{1e-4};
  /// Random batches per fraction, seeded seed, seed+1, ...
  unsigned repetitions = 5;
  /// Replay this batch file instead of generating batches.
  std::string batch_file;
  FaultPlan faults;
  std::vector<double> delay_probabilities;
  std::vector<double> delay_durations_ms;
  std::vector<unsigned> crash_counts;
  /// Barrier engines under crashes are stopped after this multiple of their
  /// fault-free time.
  double watchdog_factor = 10.0;
  std::vector<unsigned> thread_counts{1, 2, 4};
  std::string out;  // empty or "-": standard output

  /// Throws std::invalid_argument on the first violated field.
  void validate() const;
};

/// Worker count from DYNRANK_THREADS, else the hardware thread count.
unsigned default_thread_count();

ExperimentConfig default_config();

/// Overlays the fields present in `j`; unknown keys are rejected.
void apply_json(ExperimentConfig& cfg, const nlohmann::json& j);
void load_json_file(ExperimentConfig& cfg, const std::string& path);

nlohmann::json to_json(const ExperimentConfig& cfg);
nlohmann::json to_json(const FaultPlan& plan);
FaultPlan fault_plan_from_json(const nlohmann::json& j, FaultPlan base = {});

}  // namespace dynrank::cli
