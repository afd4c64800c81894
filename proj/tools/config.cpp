#include "config.hpp"

#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string_view>
#include <thread>

namespace dynrank::cli {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, std::string_view where,
                    std::initializer_list<std::string_view> known) {
  if (!j.is_object()) throw std::invalid_argument(std::string(where) + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (auto k : known) ok = ok || k == key;
    if (!ok) throw std::invalid_argument("unknown key '" + key + "' in " + std::string(where));
  }
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

std::string_view to_string(Schedule s) { return s == Schedule::kStatic ? "static" : "dynamic"; }

Schedule parse_schedule(std::string_view text) {
  if (text == "dynamic") return Schedule::kDynamic;
  if (text == "static") return Schedule::kStatic;
  throw std::invalid_argument("unknown schedule '" + std::string(text) +
                              "' (expected dynamic or static)");
}

std::string_view phase_name(Phase p) { return p == Phase::kMarking ? "marking" : "ranking"; }

Phase parse_phase(std::string_view text) {
  if (text == "marking") return Phase::kMarking;
  if (text == "ranking") return Phase::kRanking;
  throw std::invalid_argument("unknown phase '" + std::string(text) +
                              "' (expected marking or ranking)");
}

}  // namespace

unsigned default_thread_count() {
  if (const char* env = std::getenv("DYNRANK_THREADS"); env && *env) {
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (*end != '\0' || value < 1)
      throw std::invalid_argument("DYNRANK_THREADS must be a positive integer, got '" +
                                  std::string(env) + "'");
    return static_cast<unsigned>(value);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

ExperimentConfig default_config() {
  ExperimentConfig cfg;
  cfg.pagerank.num_threads = default_thread_count();
  return cfg;
}

void ExperimentConfig::validate() const {
  pagerank.validate();
  batch.validate();
  if (batch_fractions.empty()) throw std::invalid_argument("at least one batch fraction is needed");
  for (double f : batch_fractions)
    if (!(f >= 0.0 && f <= 1.0)) throw std::invalid_argument("batch fractions must lie in [0, 1]");
  if (repetitions < 1) throw std::invalid_argument("repetitions must be at least 1");
  faults.validate(pagerank.num_threads);
  for (double p : delay_probabilities)
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("delay probabilities must lie in [0, 1]");
  for (double d : delay_durations_ms)
    if (!(d >= 0.0)) throw std::invalid_argument("delay durations must be non-negative");
  for (unsigned c : crash_counts)
    if (c >= pagerank.num_threads)
      throw std::invalid_argument("crash count " + std::to_string(c) +
                                  " leaves no surviving worker out of " +
                                  std::to_string(pagerank.num_threads));
  if (!(watchdog_factor > 0.0)) throw std::invalid_argument("watchdog factor must be positive");
  if (thread_counts.empty()) throw std::invalid_argument("at least one thread count is needed");
  for (unsigned t : thread_counts)
    if (t < 1) throw std::invalid_argument("thread counts must be at least 1");
}

json to_json(const FaultPlan& plan) {
  json points = json::array();
  for (const auto& p : plan.crash_points)
    points.push_back({{"worker", p.worker},
                      {"phase", phase_name(p.phase)},
                      {"iteration", p.iteration},
                      {"position", p.position}});
  return {{"delay_probability", plan.delay_probability},
          {"delay_ms", plan.delay_ms},
          {"crash_count", plan.crash_count},
          {"crash_window_iterations", plan.crash_window_iterations},
          {"seed", plan.seed},
          {"virtual_clock", plan.virtual_clock},
          {"crash_points", points}};
}

FaultPlan fault_plan_from_json(const json& j, FaultPlan plan) {
  reject_unknown(j, "faults",
                 {"delay_probability", "delay_ms", "crash_count", "crash_window_iterations",
                  "seed", "virtual_clock", "crash_points", "delay_probabilities",
                  "delay_durations_ms", "crash_counts", "watchdog_factor"});
  read(j, "delay_probability", plan.delay_probability);
  read(j, "delay_ms", plan.delay_ms);
  read(j, "crash_count", plan.crash_count);
  read(j, "crash_window_iterations", plan.crash_window_iterations);
  read(j, "seed", plan.seed);
  read(j, "virtual_clock", plan.virtual_clock);
  if (j.contains("crash_points")) {
    plan.crash_points.clear();
    for (const auto& p : j.at("crash_points")) {
      reject_unknown(p, "crash point", {"worker", "phase", "iteration", "position"});
      CrashPoint point;
      read(p, "worker", point.worker);
      if (p.contains("phase")) point.phase = parse_phase(p.at("phase").get<std::string>());
      read(p, "iteration", point.iteration);
      read(p, "position", point.position);
      plan.crash_points.push_back(point);
    }
  }
  return plan;
}

void apply_json(ExperimentConfig& cfg, const json& j) {
  reject_unknown(j, "config",
                 {"graph", "format", "engine", "pagerank", "batch", "faults", "thread_counts", "out"});
  read(j, "graph", cfg.graph);
  if (j.contains("format")) cfg.format = parse_graph_format(j.at("format").get<std::string>());
  if (j.contains("engine")) cfg.engine = parse_engine_id(j.at("engine").get<std::string>());
  read(j, "thread_counts", cfg.thread_counts);
  read(j, "out", cfg.out);

  if (j.contains("pagerank")) {
    const json& p = j.at("pagerank");
    reject_unknown(p, "pagerank",
                   {"damping", "iteration_tolerance", "frontier_tolerance", "max_iterations",
                    "chunk_size", "num_threads", "schedule", "per_chunk_convergence"});
    PageRankConfig& pr = cfg.pagerank;
    read(p, "damping", pr.damping);
    read(p, "iteration_tolerance", pr.iteration_tolerance);
    if (p.contains("frontier_tolerance")) {
      if (p.at("frontier_tolerance").is_null())
        pr.frontier_tolerance.reset();
      else
        pr.frontier_tolerance = p.at("frontier_tolerance").get<double>();
    }
    read(p, "max_iterations", pr.max_iterations);
    read(p, "chunk_size", pr.chunk_size);
    read(p, "num_threads", pr.num_threads);
    if (p.contains("schedule")) pr.schedule = parse_schedule(p.at("schedule").get<std::string>());
    read(p, "per_chunk_convergence", pr.per_chunk_convergence);
  }

  if (j.contains("batch")) {
    const json& b = j.at("batch");
    reject_unknown(b, "batch",
                   {"size_fractions", "mode", "rng_seed", "initial_load_fraction", "repetitions",
                    "file"});
    read(b, "size_fractions", cfg.batch_fractions);
    if (b.contains("mode")) cfg.batch.mode = parse_batch_mode(b.at("mode").get<std::string>());
    read(b, "rng_seed", cfg.batch.rng_seed);
    read(b, "initial_load_fraction", cfg.batch.initial_load_fraction);
    read(b, "repetitions", cfg.repetitions);
    read(b, "file", cfg.batch_file);
  }

  if (j.contains("faults")) {
    const json& f = j.at("faults");
    cfg.faults = fault_plan_from_json(f, cfg.faults);
    read(f, "delay_probabilities", cfg.delay_probabilities);
    read(f, "delay_durations_ms", cfg.delay_durations_ms);
    read(f, "crash_counts", cfg.crash_counts);
    read(f, "watchdog_factor", cfg.watchdog_factor);
  }
}

void load_json_file(ExperimentConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config file '" + path + "': " + e.what());
  }
  try {
    apply_json(cfg, j);
  } catch (const json::exception& e) {
    throw std::invalid_argument("config file '" + path + "': " + e.what());
  }
}

json to_json(const ExperimentConfig& cfg) {
  const PageRankConfig& pr = cfg.pagerank;
  json frontier = pr.frontier_tolerance ? json(*pr.frontier_tolerance) : json(nullptr);
  json faults = to_json(cfg.faults);
  faults["delay_probabilities"] = cfg.delay_probabilities;
  faults["delay_durations_ms"] = cfg.delay_durations_ms;
  faults["crash_counts"] = cfg.crash_counts;
  faults["watchdog_factor"] = cfg.watchdog_factor;
  return {{"graph", cfg.graph},
          {"format", dynrank::to_string(cfg.format)},
          {"engine", dynrank::to_string(cfg.engine)},
          {"pagerank",
           {{"damping", pr.damping},
            {"iteration_tolerance", pr.iteration_tolerance},
            {"frontier_tolerance", frontier},
            {"max_iterations", pr.max_iterations},
            {"chunk_size", pr.chunk_size},
            {"num_threads", pr.num_threads},
            {"schedule", to_string(pr.schedule)},
            {"per_chunk_convergence", pr.per_chunk_convergence}}},
          {"batch",
           {{"size_fractions", cfg.batch_fractions},
            {"mode", dynrank::to_string(cfg.batch.mode)},
            {"rng_seed", cfg.batch.rng_seed},
            {"initial_load_fraction", cfg.batch.initial_load_fraction},
            {"repetitions", cfg.repetitions},
            {"file", cfg.batch_file}}},
          {"faults", faults},
          {"thread_counts", cfg.thread_counts},
          {"out", cfg.out}};
}

}  // namespace dynrank::cli
