#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace asaga {

// One suboptimality sample along a run. ticket is the global iteration label
// at snapshot time; epoch counts effective passes over the data (gradient
// evaluations / n). subopt keeps its sign; consumers clamp for log plots.
struct TraceRecord {
  std::uint64_t ticket = 0;
  std::uint64_t wall_ns = 0;
  double subopt = 0.0;
  double epoch = 0.0;
};

struct RunTrace {
  std::string algorithm;
  std::size_t p = 1;
  std::uint64_t seed = 0;
  std::vector<TraceRecord> records;
  bool converged = false;  // reached the configured target
};

// Per-worker observation window: the worker's own first and last global
// labels over `count` consecutive iterations of its own.
struct OverlapWindow {
  int worker = 0;
  std::uint64_t first_label = 0;
  std::uint64_t last_label = 0;
  std::uint64_t count = 0;
};

// Raw material gathered by an instrumented run.
struct OverlapData {
  std::size_t p = 1;
  std::vector<OverlapWindow> windows;
  // iteration-duration extremes/mean across all workers, for the bounds
  std::uint64_t min_iter_ns = 0;
  std::uint64_t max_iter_ns = 0;
  double mean_iter_ns = 0.0;
};

struct OverlapEstimate {
  // (last - first - (count-1)) / count per window: foreign iterations
  // interleaved into the window, per own iteration. A lower bound on the
  // true overlap.
  std::vector<double> mean_overlap_per_window;
  double max_observed = 0.0;
  // (p-1) * R with R = max/min measured iteration duration
  double upper_bound = 0.0;
  double duration_ratio_max_min = 0.0;
  double duration_ratio_max_mean = 0.0;
};

OverlapEstimate estimate_overlap(const OverlapData& data);

struct SpeedupRow {
  std::size_t p = 1;
  bool reached = false;
  double iters_to_target = 0.0;  // averaged over the runs at this p
  double ns_to_target = 0.0;
  double iteration_speedup = 0.0;  // p * iters(1) / iters(p)
  double time_speedup = 0.0;       // time(1) / time(p)
};

// Groups runs by worker count, averages time/iterations-to-target within
// each group, and reports both speedups against the p=1 group. Runs that
// never reach the target are excluded and flagged.
std::vector<SpeedupRow> speedup_table(const std::vector<RunTrace>& runs,
                                      double target);

// CSV with header algorithm,p,seed,ticket,wall_ns,epoch,subopt; numbers
// printed so that re-parsing reproduces every record exactly.
std::string format_csv(const RunTrace& trace);
void emit_csv(const RunTrace& trace, const std::string& path);
RunTrace parse_csv(const std::string& text);
RunTrace load_csv(const std::string& path);

std::string trace_filename(const std::string& algo, std::size_t p,
                           std::uint64_t seed);

}  // namespace asaga
