#include "asaga/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace asaga {

OverlapEstimate estimate_overlap(const OverlapData& data) {
  OverlapEstimate est;
  est.mean_overlap_per_window.reserve(data.windows.size());
  for (const auto& w : data.windows) {
    if (w.count == 0) continue;
    const double span = static_cast<double>(w.last_label) -
                        static_cast<double>(w.first_label);
    const double foreign = span - static_cast<double>(w.count - 1);
    est.mean_overlap_per_window.push_back(foreign /
                                          static_cast<double>(w.count));
  }
  for (double v : est.mean_overlap_per_window)
    est.max_observed = std::max(est.max_observed, v);
  if (data.min_iter_ns > 0) {
    est.duration_ratio_max_min = static_cast<double>(data.max_iter_ns) /
                                 static_cast<double>(data.min_iter_ns);
  }
  if (data.mean_iter_ns > 0.0) {
    est.duration_ratio_max_mean =
        static_cast<double>(data.max_iter_ns) / data.mean_iter_ns;
  }
  est.upper_bound =
      static_cast<double>(data.p - 1) * est.duration_ratio_max_min;
  return est;
}

namespace {

// First record at or below the target; returns false if never reached.
bool crossing(const RunTrace& run, double target, double& iters,
              double& ns) {
  for (const auto& r : run.records) {
    if (r.subopt <= target) {
      iters = static_cast<double>(r.ticket);
      ns = static_cast<double>(r.wall_ns);
      return true;
    }
  }
  return false;
}

}  // namespace

std::vector<SpeedupRow> speedup_table(const std::vector<RunTrace>& runs,
                                      double target) {
  struct Acc {
    double iters = 0.0;
    double ns = 0.0;
    std::size_t reached = 0;
    std::size_t total = 0;
  };
  std::map<std::size_t, Acc> groups;
  for (const auto& run : runs) {
    auto& g = groups[run.p];
    ++g.total;
    double iters = 0.0, ns = 0.0;
    if (crossing(run, target, iters, ns)) {
      g.iters += iters;
      g.ns += ns;
      ++g.reached;
    }
  }
  std::vector<SpeedupRow> table;
  double base_iters = 0.0, base_ns = 0.0;
  bool have_base = false;
  for (const auto& [p, g] : groups) {
    SpeedupRow row;
    row.p = p;
    row.reached = g.reached == g.total && g.total > 0;
    if (g.reached > 0) {
      row.iters_to_target = g.iters / static_cast<double>(g.reached);
      row.ns_to_target = g.ns / static_cast<double>(g.reached);
    }
    if (p == 1 && g.reached > 0) {
      base_iters = row.iters_to_target;
      base_ns = row.ns_to_target;
      have_base = true;
    }
    table.push_back(row);
  }
  if (have_base) {
    for (auto& row : table) {
      if (row.reached && row.iters_to_target > 0.0) {
        row.iteration_speedup =
            static_cast<double>(row.p) * base_iters / row.iters_to_target;
      }
      if (row.reached && row.ns_to_target > 0.0)
        row.time_speedup = base_ns / row.ns_to_target;
    }
  }
  return table;
}

std::string format_csv(const RunTrace& trace) {
  std::string out = "algorithm,p,seed,ticket,wall_ns,epoch,subopt\n";
  char buf[160];
  for (const auto& r : trace.records) {
    std::snprintf(buf, sizeof buf, "%s,%zu,%llu,%llu,%llu,%.17g,%.17g\n",
                  trace.algorithm.c_str(), trace.p,
                  static_cast<unsigned long long>(trace.seed),
                  static_cast<unsigned long long>(r.ticket),
                  static_cast<unsigned long long>(r.wall_ns), r.epoch,
                  r.subopt);
    out += buf;
  }
  return out;
}

void emit_csv(const RunTrace& trace, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << format_csv(trace);
  if (!f) throw std::runtime_error("write failed: " + path);
}

RunTrace parse_csv(const std::string& text) {
  RunTrace trace;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty trace file");
  if (line != "algorithm,p,seed,ticket,wall_ns,epoch,subopt")
    throw std::runtime_error("unexpected trace header: " + line);
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != 7)
      throw std::runtime_error("malformed trace row: " + line);
    if (first) {
      trace.algorithm = fields[0];
      trace.p = std::strtoull(fields[1].c_str(), nullptr, 10);
      trace.seed = std::strtoull(fields[2].c_str(), nullptr, 10);
      first = false;
    }
    TraceRecord r;
    r.ticket = std::strtoull(fields[3].c_str(), nullptr, 10);
    r.wall_ns = std::strtoull(fields[4].c_str(), nullptr, 10);
    r.epoch = std::strtod(fields[5].c_str(), nullptr);
    r.subopt = std::strtod(fields[6].c_str(), nullptr);
    trace.records.push_back(r);
  }
  return trace;
}

RunTrace load_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open trace: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_csv(ss.str());
}

std::string trace_filename(const std::string& algo, std::size_t p,
                           std::uint64_t seed) {
  return algo + "_" + std::to_string(p) + "_" + std::to_string(seed) +
         ".csv";
}

}  // namespace asaga
