#include "dynrank/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "dynrank/updates.hpp"

namespace dynrank {

RankVector reference_pagerank(const Graph& graph, double damping, std::size_t max_iterations) {
  const std::size_t n = graph.num_vertices();
  if (n == 0) return {};
  const double base = (1.0 - damping) / static_cast<double>(n);
  RankVector ranks(n, 1.0 / static_cast<double>(n));
  RankVector next(n);
  for (std::size_t it = 0; it < max_iterations; ++it) {
    double change = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      double r = base;
      for (VertexId u : graph.in_neighbors(static_cast<VertexId>(v)))
        r += damping * ranks[u] / static_cast<double>(graph.out_degree(u));
      next[v] = r;
      change = std::max(change, std::abs(r - ranks[v]));
    }
    ranks.swap(next);
    if (change == 0.0) break;
  }
  return ranks;
}

double error_vs_reference(std::span<const double> ranks, const Graph& graph, double damping) {
  if (ranks.size() != graph.num_vertices())
    throw std::invalid_argument("rank vector size does not match the graph");
  return linf_norm(ranks, reference_pagerank(graph, damping));
}

ErrorReport measure(const RunReport& run, std::span<const double> reference) {
  return {linf_norm(run.ranks, reference), run.seconds, run.iterations};
}

StabilityResult stability_experiment(const Graph& graph, double fraction, EngineId engine,
                                     const PageRankConfig& cfg, std::uint64_t seed) {
  BatchSpec spec;
  spec.size_fraction = fraction;
  spec.mode = BatchMode::kRandomDeletions;
  spec.rng_seed = seed;
  const BatchUpdate removal = generate_random_batch(graph, spec);
  StabilityResult result;
  if (removal.empty()) return result;

  const RunReport original =
      run_engine(static_counterpart(engine), graph, graph, BatchUpdate{}, {}, cfg);
  const Graph reduced = apply_batch(graph, removal);
  result.deleted_edges = removal.deletions.size();
  result.removal = run_engine(engine, graph, reduced, removal, original.ranks, cfg);
  result.restore =
      run_engine(engine, reduced, graph, removal.inverse(), result.removal.ranks, cfg);
  result.distance = linf_norm(result.restore.ranks, original.ranks);
  return result;
}

double stability_roundtrip(const Graph& graph, double fraction, EngineId engine,
                           const PageRankConfig& cfg, std::uint64_t seed) {
  return stability_experiment(graph, fraction, engine, cfg, seed).distance;
}

std::vector<ScalingRow> scaling_sweep(const Graph& prev, const Graph& curr,
                                      const BatchUpdate& batch,
                                      std::span<const double> prev_ranks, EngineId engine,
                                      PageRankConfig cfg, std::span<const unsigned> thread_counts,
                                      std::span<const double> reference, unsigned repetitions) {
  if (thread_counts.empty()) throw std::invalid_argument("scaling sweep needs a thread count");
  if (repetitions < 1) throw std::invalid_argument("repetitions must be at least 1");
  std::vector<ScalingRow> rows;
  for (unsigned threads : thread_counts) {
    cfg.num_threads = threads;
    ScalingRow row;
    row.threads = threads;
    for (unsigned rep = 0; rep < repetitions; ++rep) {
      const RunReport run = run_engine(engine, prev, curr, batch, prev_ranks, cfg);
      row.seconds += run.seconds;
      row.error = std::max(row.error, linf_norm(run.ranks, reference));
    }
    row.seconds /= repetitions;
    rows.push_back(row);
  }
  auto baseline = std::find_if(rows.begin(), rows.end(), [](auto& r) { return r.threads == 1; });
  const double t1 = baseline != rows.end() ? baseline->seconds : rows.front().seconds;
  for (auto& row : rows) row.speedup = row.seconds > 0.0 ? t1 / row.seconds : 1.0;
  if (baseline != rows.end()) baseline->speedup = 1.0;
  return rows;
}

void write_scaling_csv(std::ostream& out, std::span<const ScalingRow> rows) {
  out << "threads,seconds,speedup,error\n";
  for (const auto& row : rows)
    out << row.threads << ',' << format_double(row.seconds) << ',' << format_double(row.speedup)
        << ',' << format_double(row.error) << '\n';
}

double geometric_mean(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("geometric mean of no values");
  double log_sum = 0.0;
  for (double v : values) {
    if (!(v > 0.0)) throw std::invalid_argument("geometric mean needs positive values");
    log_sum += std::log(v);
  }
  return std::exp(log_sum / static_cast<double>(values.size()));
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

namespace {

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::vector<std::string> split_csv(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  if (quoted) throw ParseError("unterminated quoted field", line_no);
  return fields;
}

template <class T>
T parse_number(const std::string& text, std::size_t line_no, const char* column) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ParseError(std::string("invalid ") + column + " '" + text + "'", line_no);
  return value;
}

constexpr std::size_t kFixedColumns = 11;

}  // namespace

void write_report_csv(std::ostream& out, std::span<const ReportRow> rows) {
  out << kReportHeader;
  if (!rows.empty())
    for (const auto& [name, value] : rows.front().extra) out << ',' << quote(name);
  out << '\n';
  for (const auto& row : rows) {
    if (row.extra.size() != rows.front().extra.size())
      throw std::invalid_argument("report rows carry different extra columns");
    out << quote(row.graph) << ',' << quote(row.engine) << ',' << format_double(row.batch_fraction)
        << ',' << row.threads << ',' << row.seed << ',' << row.iterations << ','
        << format_double(row.seconds) << ',' << format_double(row.error) << ','
        << row.affected_initial << ',' << row.affected_total << ','
        << (row.converged ? "true" : "false");
    for (std::size_t i = 0; i < row.extra.size(); ++i) {
      if (row.extra[i].first != rows.front().extra[i].first)
        throw std::invalid_argument("report rows carry different extra columns");
      out << ',' << quote(row.extra[i].second);
    }
    out << '\n';
  }
}

std::vector<ReportRow> read_report_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError("empty report", 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv(line, line_no);
  const auto fixed = split_csv(kReportHeader, 0);
  if (header.size() < kFixedColumns || !std::equal(fixed.begin(), fixed.end(), header.begin()))
    throw ParseError(std::string("expected header starting '") + kReportHeader + "'", 1);

  std::vector<ReportRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv(line, line_no);
    if (f.size() != header.size())
      throw ParseError("expected " + std::to_string(header.size()) + " fields, found " +
                           std::to_string(f.size()),
                       line_no);
    ReportRow row;
    row.graph = f[0];
    row.engine = f[1];
    row.batch_fraction = parse_number<double>(f[2], line_no, "batch_fraction");
    row.threads = parse_number<unsigned>(f[3], line_no, "threads");
    row.seed = parse_number<std::uint64_t>(f[4], line_no, "seed");
    row.iterations = parse_number<std::size_t>(f[5], line_no, "iterations");
    row.seconds = parse_number<double>(f[6], line_no, "seconds");
    row.error = parse_number<double>(f[7], line_no, "error");
    row.affected_initial = parse_number<std::size_t>(f[8], line_no, "affected_initial");
    row.affected_total = parse_number<std::size_t>(f[9], line_no, "affected_total");
    if (f[10] != "true" && f[10] != "false")
      throw ParseError("invalid converged '" + f[10] + "'", line_no);
    row.converged = f[10] == "true";
    for (std::size_t i = kFixedColumns; i < f.size(); ++i) row.extra.emplace_back(header[i], f[i]);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace dynrank
