#include "cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>

#include "config.hpp"
#include "dynrank/metrics.hpp"

namespace dynrank::cli {

namespace {

// Raw flag values for one subcommand. Only flags actually given on the
// command line are copied into the config, after the JSON file is applied.
struct FlagValues {
  std::string config, graph, format, engine, schedule, mode, batch_file, out;
  double damping = 0, tolerance = 0, frontier_tolerance = 0, load_fraction = 0;
  double watchdog_factor = 0;
  std::size_t max_iterations = 0, chunk_size = 0, crash_window = 0;
  unsigned threads = 0, repetitions = 0;
  bool per_chunk = false, virtual_clock = false;
  std::uint64_t seed = 0, fault_seed = 0;
  std::vector<double> fractions, delay_probabilities, delay_ms;
  std::vector<unsigned> crash_counts, thread_counts;
};

template <class T>
constexpr bool is_vector = false;
template <class T>
constexpr bool is_vector<std::vector<T>> = true;

class Subcommand {
 public:
  Subcommand(CLI::App& app, const char* name, const char* description)
      : app_(app.add_subcommand(name, description)) {}

  CLI::App* app() const { return app_; }
  FlagValues& values() { return *values_; }

  template <class T>
  void add(const char* flag, T& storage, const char* help,
           std::function<void(ExperimentConfig&)> apply) {
    CLI::Option* opt = app_->add_option(flag, storage, help);
    if constexpr (is_vector<T>) opt->delimiter(',');
    overrides_.emplace_back(opt, std::move(apply));
  }
  void add_flag(const char* flag, bool& storage, const char* help,
                std::function<void(ExperimentConfig&)> apply) {
    overrides_.emplace_back(app_->add_flag(flag, storage, help), std::move(apply));
  }

  ExperimentConfig resolve() const {
    ExperimentConfig cfg = default_config();
    if (!values_->config.empty()) load_json_file(cfg, values_->config);
    for (const auto& [opt, apply] : overrides_)
      if (opt->count() > 0) apply(cfg);
    cfg.validate();
    return cfg;
  }

 private:
  CLI::App* app_;
  std::unique_ptr<FlagValues> values_ = std::make_unique<FlagValues>();
  std::vector<std::pair<CLI::Option*, std::function<void(ExperimentConfig&)>>> overrides_;
};

void add_input_flags(Subcommand& s) {
  FlagValues& v = s.values();
  s.app()->add_option("--config", v.config, "JSON config file; flags given here override it");
  s.add("--graph", v.graph, "Graph file (MatrixMarket or 'u v [t]' edge list)",
        [&v](auto& c) { c.graph = v.graph; });
  s.add("--format", v.format, "auto, mtx, edgelist or temporal",
        [&v](auto& c) { c.format = parse_graph_format(v.format); });
  s.add("--batch-fraction", v.fractions, "Batch size as a fraction of |E| (comma-separated)",
        [&v](auto& c) { c.batch_fractions = v.fractions; });
  s.add("--batch-mode", v.mode,
        "random-mixed, random-deletions-only, random-insertions-only or temporal-replay",
        [&v](auto& c) { c.batch.mode = parse_batch_mode(v.mode); });
  s.add("--seed", v.seed, "Batch generation seed", [&v](auto& c) { c.batch.rng_seed = v.seed; });
  s.add("--initial-load-fraction", v.load_fraction,
        "Share of a temporal stream loaded before replay",
        [&v](auto& c) { c.batch.initial_load_fraction = v.load_fraction; });
  s.add("--out", v.out, "Output CSV path ('-' for standard output)",
        [&v](auto& c) { c.out = v.out; });
}

void add_engine_flags(Subcommand& s) {
  FlagValues& v = s.values();
  s.add("--engine", v.engine, "static-bb, static-lf, nd-bb, nd-lf, dt-bb, dt-lf, df-bb, df-lf",
        [&v](auto& c) { c.engine = parse_engine_id(v.engine); });
  s.add("--damping", v.damping, "Damping factor", [&v](auto& c) { c.pagerank.damping = v.damping; });
  s.add("--iteration-tolerance", v.tolerance, "L-infinity convergence tolerance",
        [&v](auto& c) { c.pagerank.iteration_tolerance = v.tolerance; });
  s.add("--frontier-tolerance", v.frontier_tolerance,
        "Rank change that expands the frontier (default: iteration tolerance / 1000)",
        [&v](auto& c) { c.pagerank.frontier_tolerance = v.frontier_tolerance; });
  s.add("--max-iterations", v.max_iterations, "Iteration cap",
        [&v](auto& c) { c.pagerank.max_iterations = v.max_iterations; });
  s.add("--chunk-size", v.chunk_size, "Vertices or batch edges per work unit",
        [&v](auto& c) { c.pagerank.chunk_size = v.chunk_size; });
  s.add("--threads", v.threads, "Worker count (default: DYNRANK_THREADS or all cores)",
        [&v](auto& c) { c.pagerank.num_threads = v.threads; });
  s.add("--schedule", v.schedule, "Barrier engines: dynamic or static chunk assignment",
        [&v](auto& c) {
          if (v.schedule == "static")
            c.pagerank.schedule = Schedule::kStatic;
          else if (v.schedule == "dynamic")
            c.pagerank.schedule = Schedule::kDynamic;
          else
            throw std::invalid_argument("unknown schedule '" + v.schedule +
                                        "' (expected dynamic or static)");
        });
  s.add_flag("--per-chunk-convergence", v.per_chunk,
             "Lock-free engines: track convergence per vertex chunk",
             [&v](auto& c) { c.pagerank.per_chunk_convergence = v.per_chunk; });
  s.add("--repetitions", v.repetitions, "Random batches per batch fraction",
        [&v](auto& c) { c.repetitions = v.repetitions; });
}

void add_fault_flags(Subcommand& s) {
  FlagValues& v = s.values();
  s.add("--delay-probability", v.delay_probabilities,
        "Per-vertex delay probabilities to sweep (comma-separated)",
        [&v](auto& c) { c.delay_probabilities = v.delay_probabilities; });
  s.add("--delay-ms", v.delay_ms, "Delay durations in milliseconds to sweep",
        [&v](auto& c) { c.delay_durations_ms = v.delay_ms; });
  s.add("--crash-count", v.crash_counts, "Crash counts to sweep",
        [&v](auto& c) { c.crash_counts = v.crash_counts; });
  s.add("--crash-window", v.crash_window, "Crashes fall within this many initial iterations",
        [&v](auto& c) { c.faults.crash_window_iterations = v.crash_window; });
  s.add("--fault-seed", v.fault_seed, "Fault plan seed",
        [&v](auto& c) { c.faults.seed = v.fault_seed; });
  s.add_flag("--virtual-clock", v.virtual_clock, "Record delays without sleeping",
             [&v](auto& c) { c.faults.virtual_clock = v.virtual_clock; });
  s.add("--watchdog-factor", v.watchdog_factor,
        "Stop crashed barrier-based runs after this multiple of the fault-free time",
        [&v](auto& c) { c.watchdog_factor = v.watchdog_factor; });
}

// --- experiment plumbing -------------------------------------------------

struct Input {
  EdgeStream stream;
  std::string name;
  bool temporal = false;
};

Input load_input(const ExperimentConfig& cfg) {
  if (cfg.graph.empty()) throw std::invalid_argument("no graph given (use --graph)");
  Input in;
  in.stream = load_edges(cfg.graph, cfg.format);
  in.name = std::filesystem::path(cfg.graph).stem().string();
  in.temporal = in.stream.temporal || cfg.batch.mode == BatchMode::kTemporalReplay;
  return in;
}

Graph full_graph(const Input& in) {
  return Graph::build(in.stream.edges, in.stream.num_vertices, true);
}

BatchSpec random_spec(const ExperimentConfig& cfg, double fraction, unsigned rep) {
  BatchSpec spec = cfg.batch;
  if (spec.mode == BatchMode::kTemporalReplay) spec.mode = BatchMode::kRandomMixed;
  spec.size_fraction = fraction;
  spec.rng_seed = cfg.batch.rng_seed + rep;
  return spec;
}

RankVector baseline_ranks(const ExperimentConfig& cfg, const Graph& g) {
  return run_engine(static_counterpart(cfg.engine), g, g, BatchUpdate{}, {}, cfg.pagerank).ranks;
}

ReportRow make_row(const ExperimentConfig& cfg, const Input& in, double fraction,
                   std::uint64_t seed, const RunReport& run, double error) {
  ReportRow row;
  row.graph = in.name;
  row.engine = std::string(to_string(cfg.engine));
  row.batch_fraction = fraction;
  row.threads = cfg.pagerank.num_threads;
  row.seed = seed;
  row.iterations = run.iterations;
  row.seconds = run.seconds;
  row.error = error;
  row.affected_initial = run.affected_initial;
  row.affected_total = run.affected_total;
  row.converged = run.converged();
  return row;
}

template <class Write>
void emit(const ExperimentConfig& cfg, std::ostream& out, Write&& write) {
  if (cfg.out.empty() || cfg.out == "-") {
    write(out);
    return;
  }
  std::ofstream file(cfg.out);
  if (!file) throw std::runtime_error("cannot write '" + cfg.out + "'");
  write(file);
  if (!file) throw std::runtime_error("failed writing '" + cfg.out + "'");
}

void write_rows(const ExperimentConfig& cfg, std::ostream& out, const std::vector<ReportRow>& rows) {
  emit(cfg, out, [&](std::ostream& o) { write_report_csv(o, rows); });
}

int cmd_run(const ExperimentConfig& cfg, std::ostream& out) {
  const Input in = load_input(cfg);
  std::vector<ReportRow> rows;

  if (in.temporal && cfg.batch_file.empty()) {
    for (double fraction : cfg.batch_fractions) {
      BatchSpec spec = cfg.batch;
      spec.mode = BatchMode::kTemporalReplay;
      spec.size_fraction = fraction;
      TemporalReplay replay = temporal_batches(in.stream.edges, spec);
      Graph prev = std::move(replay.initial);
      RankVector ranks = baseline_ranks(cfg, prev);
      for (const BatchUpdate& batch : replay.batches) {
        Graph curr = apply_batch(prev, batch);
        RunReport run = run_engine(cfg.engine, prev, curr, batch, ranks, cfg.pagerank);
        const double error = error_vs_reference(run.ranks, curr, cfg.pagerank.damping);
        rows.push_back(make_row(cfg, in, fraction, spec.rng_seed, run, error));
        ranks = std::move(run.ranks);
        prev = std::move(curr);
      }
    }
    write_rows(cfg, out, rows);
    return 0;
  }

  const Graph g = full_graph(in);
  const RankVector ranks = baseline_ranks(cfg, g);
  auto run_batch = [&](const BatchUpdate& batch, double fraction, std::uint64_t seed) {
    const Graph curr = apply_batch(g, batch);
    const RunReport run = run_engine(cfg.engine, g, curr, batch, ranks, cfg.pagerank);
    const double error = error_vs_reference(run.ranks, curr, cfg.pagerank.damping);
    rows.push_back(make_row(cfg, in, fraction, seed, run, error));
  };

  if (!cfg.batch_file.empty()) {
    std::ifstream file(cfg.batch_file);
    if (!file) throw std::runtime_error("cannot open batch file '" + cfg.batch_file + "'");
    BatchUpdate batch;
    try {
      batch = read_batch_csv(file);
    } catch (const ParseError& e) {
      throw ParseError(e.detail(), e.line(), cfg.batch_file);
    }
    const double proper = static_cast<double>(g.num_proper_edges());
    run_batch(batch, proper > 0 ? static_cast<double>(batch.size()) / proper : 0.0,
              cfg.batch.rng_seed);
  } else {
    for (double fraction : cfg.batch_fractions)
      for (unsigned rep = 0; rep < cfg.repetitions; ++rep) {
        const BatchSpec spec = random_spec(cfg, fraction, rep);
        run_batch(generate_random_batch(g, spec), fraction, spec.rng_seed);
      }
  }
  write_rows(cfg, out, rows);
  return 0;
}

int cmd_faultsim(const ExperimentConfig& cfg, std::ostream& out) {
  const Input in = load_input(cfg);
  const Graph g = full_graph(in);
  const RankVector ranks = baseline_ranks(cfg, g);
  auto or_default = [](auto list, auto fallback) {
    if (list.empty()) list.push_back(fallback);
    return list;
  };
  const auto probabilities = or_default(cfg.delay_probabilities, cfg.faults.delay_probability);
  const auto durations = or_default(cfg.delay_durations_ms, cfg.faults.delay_ms);
  const auto crash_counts = or_default(cfg.crash_counts, cfg.faults.crash_count);

  std::vector<ReportRow> rows;
  for (double fraction : cfg.batch_fractions) {
    for (unsigned rep = 0; rep < cfg.repetitions; ++rep) {
      const BatchSpec spec = random_spec(cfg, fraction, rep);
      const BatchUpdate batch = generate_random_batch(g, spec);
      const Graph curr = apply_batch(g, batch);
      const RankVector reference = reference_pagerank(curr, cfg.pagerank.damping);
      const double fault_free =
          run_engine(cfg.engine, g, curr, batch, ranks, cfg.pagerank).seconds;

      for (double p : probabilities)
        for (double ms : durations)
          for (unsigned crashes : crash_counts) {
            FaultPlan plan = cfg.faults;
            plan.delay_probability = p;
            plan.delay_ms = ms;
            plan.crash_count = crashes;
            plan.seed = cfg.faults.seed + rep;
            FaultInjector injector(plan, cfg.pagerank.num_threads, curr.num_vertices());
            RunOptions opts;
            opts.observer = &injector;
            if (!is_lock_free(cfg.engine) && !injector.crash_points().empty()) {
              const double limit = std::max(0.05, cfg.watchdog_factor * fault_free);
              opts.watchdog = std::chrono::duration_cast<std::chrono::nanoseconds>(
                  std::chrono::duration<double>(limit));
            }
            const RunReport run = run_engine(cfg.engine, g, curr, batch, ranks, cfg.pagerank, opts);
            ReportRow row =
                make_row(cfg, in, fraction, spec.rng_seed, run, linf_norm(run.ranks, reference));
            const double delay_seconds =
                std::chrono::duration<double>(injector.delay_time()).count();
            row.extra = {{"delay_probability", format_double(p)},
                         {"delay_ms", format_double(ms)},
                         {"crash_count", std::to_string(crashes)},
                         {"crashed_workers", std::to_string(run.crashed_workers)},
                         {"delays", std::to_string(injector.delays())},
                         {"delay_seconds", format_double(delay_seconds)},
                         {"status", std::string(to_string(run.status))}};
            rows.push_back(std::move(row));
          }
    }
  }
  write_rows(cfg, out, rows);
  return 0;
}

int cmd_stability(const ExperimentConfig& cfg, std::ostream& out) {
  const Input in = load_input(cfg);
  const Graph g = full_graph(in);
  std::vector<ReportRow> rows;
  for (double fraction : cfg.batch_fractions)
    for (unsigned rep = 0; rep < cfg.repetitions; ++rep) {
      const std::uint64_t seed = cfg.batch.rng_seed + rep;
      const StabilityResult result = stability_experiment(g, fraction, cfg.engine, cfg.pagerank, seed);
      RunReport combined = result.restore;
      combined.iterations += result.removal.iterations;
      combined.seconds += result.removal.seconds;
      if (result.deleted_edges == 0) combined.status = RunStatus::kConverged;
      else if (!result.removal.converged()) combined.status = result.removal.status;
      ReportRow row = make_row(cfg, in, fraction, seed, combined, result.distance);
      row.extra = {{"deleted_edges", std::to_string(result.deleted_edges)}};
      rows.push_back(std::move(row));
    }
  write_rows(cfg, out, rows);
  return 0;
}

int cmd_scaling(const ExperimentConfig& cfg, std::ostream& out) {
  const Input in = load_input(cfg);
  const Graph g = full_graph(in);
  const BatchSpec spec = random_spec(cfg, cfg.batch_fractions.front(), 0);
  const BatchUpdate batch = generate_random_batch(g, spec);
  const Graph curr = apply_batch(g, batch);
  const RankVector ranks = baseline_ranks(cfg, g);
  const RankVector reference = reference_pagerank(curr, cfg.pagerank.damping);
  const auto rows = scaling_sweep(g, curr, batch, ranks, cfg.engine, cfg.pagerank,
                                  cfg.thread_counts, reference, cfg.repetitions);
  emit(cfg, out, [&](std::ostream& o) { write_scaling_csv(o, rows); });
  return 0;
}

int cmd_genbatch(const ExperimentConfig& cfg, std::ostream& out) {
  if (cfg.batch.mode == BatchMode::kTemporalReplay)
    throw std::invalid_argument("genbatch generates random batches; temporal streams are "
                                "replayed directly by 'run'");
  const Input in = load_input(cfg);
  const Graph g = full_graph(in);
  const BatchUpdate batch = generate_random_batch(g, random_spec(cfg, cfg.batch_fractions.front(), 0));
  emit(cfg, out, [&](std::ostream& o) { write_batch_csv(o, batch); });
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"dynrank: dynamic PageRank engines and experiment harness", "dynrank"};
  app.require_subcommand(1);

  Subcommand run(app, "run", "Update ranks for each batch and report errors and timings");
  add_input_flags(run);
  add_engine_flags(run);
  run.add("--batch-file", run.values().batch_file, "Replay this 'op,u,v' batch file",
          [&v = run.values()](auto& c) { c.batch_file = v.batch_file; });

  Subcommand faultsim(app, "faultsim", "Sweep injected delays and crashes");
  add_input_flags(faultsim);
  add_engine_flags(faultsim);
  add_fault_flags(faultsim);

  Subcommand stability(app, "stability", "Delete a batch, re-insert it, and measure drift");
  add_input_flags(stability);
  add_engine_flags(stability);

  Subcommand scaling(app, "scaling", "Time one batch update across thread counts");
  add_input_flags(scaling);
  add_engine_flags(scaling);
  scaling.add("--thread-counts", scaling.values().thread_counts, "Thread counts to time",
              [&v = scaling.values()](auto& c) { c.thread_counts = v.thread_counts; });

  Subcommand genbatch(app, "genbatch", "Write a random batch as 'op,u,v' CSV");
  add_input_flags(genbatch);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  const std::pair<Subcommand*, int (*)(const ExperimentConfig&, std::ostream&)> commands[] = {
      {&run, cmd_run},
      {&faultsim, cmd_faultsim},
      {&stability, cmd_stability},
      {&scaling, cmd_scaling},
      {&genbatch, cmd_genbatch},
  };
  try {
    for (const auto& [sub, fn] : commands)
      if (sub->app()->parsed()) return fn(sub->resolve(), out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace dynrank::cli
