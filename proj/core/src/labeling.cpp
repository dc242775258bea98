#include "asaga/labeling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "asaga/rng.hpp"

namespace asaga {

std::vector<double> ToyProblem::factor_gradient(
    std::size_t i, const std::vector<double>& x) const {
  const Factor& f = factors.at(i);
  std::vector<double> g(dim, 0.0);
  for (std::size_t k = 0; k < f.support.size(); ++k)
    g[f.support[k]] = x[f.support[k]] - f.center[k];
  return g;
}

std::vector<double> ToyProblem::mean_gradient(
    const std::vector<double>& x) const {
  std::vector<double> g(dim, 0.0);
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const auto gi = factor_gradient(i, x);
    for (std::size_t v = 0; v < dim; ++v) g[v] += gi[v];
  }
  for (double& gv : g) gv /= static_cast<double>(factors.size());
  return g;
}

namespace {

struct IterationRec {
  int core = 0;
  std::size_t i = 0;
  double read_start = 0.0;
  double read_end = 0.0;
  double write_time = 0.0;
  std::vector<double> xhat, update;
  std::size_t read_seq = 0, write_seq = 0;
};

struct CoreState {
  std::size_t done = 0;        // completed iterations
  bool pending_write = false;  // else: pending read
  bool active = true;
  double event_time = 0.0;
  double read_start = 0.0;
  std::size_t rec = 0;  // iteration owning the pending write
  CounterRng rng{0};
  std::size_t forced_used = 0;
};

void validate(const ScheduleScript& script, const ToyProblem& toy,
              const std::vector<double>& x0) {
  if (script.cores == 0) throw std::invalid_argument("need at least one core");
  if (script.horizon == 0) throw std::invalid_argument("horizon must be >= 1");
  if (script.read_duration < 0.0)
    throw std::invalid_argument("read duration must be >= 0");
  if (!script.per_core_read_duration.empty()) {
    if (script.per_core_read_duration.size() != script.cores)
      throw std::invalid_argument("need one read duration per core");
    for (double r : script.per_core_read_duration)
      if (r < 0.0)
        throw std::invalid_argument("read duration must be >= 0");
  }
  if (toy.factors.empty()) throw std::invalid_argument("need factors");
  if (script.compute_duration.size() != toy.factors.size())
    throw std::invalid_argument("one compute duration per factor required");
  for (double c : script.compute_duration)
    if (!(c > 0.0))
      throw std::invalid_argument("compute durations must be positive");
  if (x0.size() != toy.dim) throw std::invalid_argument("x0 dimension mismatch");
  for (const auto& f : toy.factors) {
    if (f.support.size() != f.center.size())
      throw std::invalid_argument("factor support/center size mismatch");
    for (std::size_t k = 0; k < f.support.size(); ++k) {
      if (f.support[k] >= toy.dim ||
          (k > 0 && f.support[k] <= f.support[k - 1]))
        throw std::invalid_argument("factor support must be increasing, < dim");
    }
  }
}

}  // namespace

LabeledTrace simulate(const ScheduleScript& script, const ToyProblem& toy,
                      double gamma, std::vector<double> x0) {
  validate(script, toy, x0);
  const std::size_t cores = script.cores;
  const std::size_t per_core = script.horizon;  // enough to cover any labeling

  const auto read_time = [&](std::size_t c) {
    return script.per_core_read_duration.empty()
               ? script.read_duration
               : script.per_core_read_duration[c];
  };

  std::vector<CoreState> cs(cores);
  for (std::size_t c = 0; c < cores; ++c) {
    cs[c].rng = CounterRng(script.seed + c);
    cs[c].read_start = 0.0;
    cs[c].event_time = read_time(c);
  }

  std::vector<double> x = x0;
  std::vector<IterationRec> recs;
  recs.reserve(cores * per_core);
  std::size_t read_seq = 0, write_seq = 0;

  for (;;) {
    // earliest pending event; ties run writes first, then lower core id
    std::size_t best = cores;
    for (std::size_t c = 0; c < cores; ++c) {
      if (!cs[c].active) continue;
      if (best == cores) {
        best = c;
        continue;
      }
      const auto& a = cs[c];
      const auto& b = cs[best];
      if (a.event_time < b.event_time ||
          (a.event_time == b.event_time && a.pending_write &&
           !b.pending_write)) {
        best = c;
      }
    }
    if (best == cores) break;
    CoreState& core = cs[best];
    if (core.pending_write) {
      IterationRec& rec = recs[core.rec];
      rec.write_time = core.event_time;
      rec.write_seq = write_seq++;
      for (std::size_t v = 0; v < toy.dim; ++v)
        x[v] -= gamma * rec.update[v];
      ++core.done;
      if (core.done < per_core) {
        core.pending_write = false;
        core.read_start = core.event_time;
        core.event_time += read_time(best);
      } else {
        core.active = false;
      }
    } else {
      IterationRec rec;
      rec.core = static_cast<int>(best);
      rec.read_start = core.read_start;
      rec.read_end = core.event_time;
      rec.read_seq = read_seq++;
      rec.xhat = x;
      std::size_t i;
      if (best < script.forced_samples.size() &&
          core.forced_used < script.forced_samples[best].size()) {
        i = script.forced_samples[best][core.forced_used++];
        if (i >= toy.factors.size())
          throw std::invalid_argument("forced sample out of range");
      } else {
        i = core.rng.next_index(toy.factors.size());
      }
      rec.i = i;
      rec.update = toy.factor_gradient(i, rec.xhat);
      core.rec = recs.size();
      recs.push_back(std::move(rec));
      core.pending_write = true;
      core.event_time += script.compute_duration[i];
    }
  }

  // rank by the chosen rule and keep the first `horizon` iterations
  std::vector<std::size_t> order(recs.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  switch (script.labeling) {
    case Labeling::AFTER_WRITE:
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return recs[a].write_seq < recs[b].write_seq;
      });
      break;
    case Labeling::AFTER_READ:
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return recs[a].read_seq < recs[b].read_seq;
      });
      break;
    case Labeling::BEFORE_READ:
      // with constant read durations this coincides with after-read order
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (recs[a].read_start != recs[b].read_start)
          return recs[a].read_start < recs[b].read_start;
        return recs[a].core < recs[b].core;
      });
      break;
  }

  LabeledTrace trace;
  trace.x0 = std::move(x0);
  trace.gamma = gamma;
  const std::size_t labeled = std::min(script.horizon, order.size());
  trace.iterations.reserve(labeled);
  for (std::size_t l = 0; l < labeled; ++l) {
    const IterationRec& rec = recs[order[l]];
    LabeledIteration it;
    it.label = l;
    it.core = rec.core;
    it.i = rec.i;
    it.read_start = rec.read_start;
    it.read_end = rec.read_end;
    it.write_time = rec.write_time;
    it.xhat = rec.xhat;
    it.update = rec.update;
    trace.iterations.push_back(std::move(it));
  }
  trace.virtual_iterates.reserve(labeled + 1);
  trace.virtual_iterates.push_back(trace.x0);
  for (std::size_t l = 0; l < labeled; ++l) {
    auto next = trace.virtual_iterates.back();
    for (std::size_t v = 0; v < toy.dim; ++v)
      next[v] -= gamma * trace.iterations[l].update[v];
    trace.virtual_iterates.push_back(std::move(next));
  }
  return trace;
}

namespace {

// writes that landed before this iteration's read, in the order the
// simulator applied them (time, then core id; simultaneous writes beat reads)
std::vector<std::size_t> contributors(const LabeledTrace& trace,
                                      std::size_t l) {
  const auto& target = trace.iterations[l];
  std::vector<std::size_t> in;
  for (std::size_t j = 0; j < trace.iterations.size(); ++j) {
    if (j == l) continue;
    if (trace.iterations[j].write_time <= target.read_end) in.push_back(j);
  }
  std::sort(in.begin(), in.end(), [&](std::size_t a, std::size_t b) {
    if (trace.iterations[a].write_time != trace.iterations[b].write_time)
      return trace.iterations[a].write_time < trace.iterations[b].write_time;
    return trace.iterations[a].core < trace.iterations[b].core;
  });
  return in;
}

}  // namespace

bool snapshots_reconstruct(const LabeledTrace& trace) {
  for (std::size_t l = 0; l < trace.iterations.size(); ++l) {
    std::vector<double> expect = trace.x0;
    for (std::size_t j : contributors(trace, l)) {
      for (std::size_t v = 0; v < expect.size(); ++v)
        expect[v] -= trace.gamma * trace.iterations[j].update[v];
    }
    if (expect != trace.iterations[l].xhat) return false;
  }
  return true;
}

bool after_read_no_future(const LabeledTrace& trace) {
  for (std::size_t l = 0; l < trace.iterations.size(); ++l) {
    for (std::size_t j : contributors(trace, l)) {
      if (trace.iterations[j].label >= trace.iterations[l].label) return false;
    }
  }
  return true;
}

std::uint64_t measured_tau(const LabeledTrace& trace) {
  std::uint64_t tau = 0;
  const auto& its = trace.iterations;
  for (std::size_t a = 0; a < its.size(); ++a) {
    for (std::size_t b = a + 1; b < its.size(); ++b) {
      // strict: a read at exactly a write's instant sees that write (the
      // write-before-read tie rule), so touching endpoints are ordered
      const bool overlap = its[a].read_start < its[b].write_time &&
                           its[b].read_start < its[a].write_time;
      if (!overlap) continue;
      const std::uint64_t gap = its[b].label > its[a].label
                                    ? its[b].label - its[a].label
                                    : its[a].label - its[b].label;
      tau = std::max(tau, gap);
    }
  }
  return tau;
}

TwoCoreEnumeration enumerate_two_core_first_step(
    const ToyProblem& toy, double gamma, const std::vector<double>& x0,
    double fast_duration, double slow_duration) {
  if (toy.factors.size() != 2)
    throw std::invalid_argument("enumeration needs exactly two factors");
  ScheduleScript script;
  script.cores = 2;
  script.labeling = Labeling::AFTER_WRITE;
  script.horizon = 2;
  script.read_duration = 0.0;
  script.compute_duration = {fast_duration, slow_duration};

  TwoCoreEnumeration out;
  out.expected_x1.assign(toy.dim, 0.0);
  std::size_t slow_first = 0, slow_then_slow = 0;
  for (std::size_t i0 = 0; i0 < 2; ++i0) {
    for (std::size_t i1 = 0; i1 < 2; ++i1) {
      script.forced_samples = {{i0}, {i1}};
      const auto trace = simulate(script, toy, gamma, x0);
      out.branch_x1.push_back(trace.virtual_iterates[1]);
      for (std::size_t v = 0; v < toy.dim; ++v)
        out.expected_x1[v] += trace.virtual_iterates[1][v];
      if (trace.iterations[0].i == 1) {
        ++slow_first;
        if (trace.iterations[1].i == 1) ++slow_then_slow;
      }
      ++out.branch_count;
    }
  }
  for (std::size_t v = 0; v < toy.dim; ++v)
    out.expected_x1[v] /= static_cast<double>(out.branch_count);
  out.p_second_slow_given_first_slow =
      slow_first == 0 ? 0.0
                      : static_cast<double>(slow_then_slow) /
                            static_cast<double>(slow_first);
  return out;
}

std::vector<std::vector<double>> sample_labeled_updates(
    const ScheduleScript& script, const ToyProblem& toy, double gamma,
    const std::vector<double>& x0, std::uint64_t label,
    std::size_t n_samples) {
  if (label >= script.horizon)
    throw std::invalid_argument("label beyond the scripted horizon");
  std::vector<std::vector<double>> updates;
  updates.reserve(n_samples);
  ScheduleScript run = script;
  for (std::size_t k = 0; k < n_samples; ++k) {
    run.seed = script.seed + k * script.cores;  // disjoint per-core streams
    const auto trace = simulate(run, toy, gamma, x0);
    updates.push_back(trace.iterations[label].update);
  }
  return updates;
}

std::string trace_csv(const LabeledTrace& trace) {
  std::string out = "label,core,factor,read_start,read_end,write_time";
  const std::size_t dim = trace.x0.size();
  char buf[64];
  for (std::size_t v = 0; v < dim; ++v) {
    std::snprintf(buf, sizeof buf, ",update_%zu", v);
    out += buf;
  }
  out += "\n";
  char num[160];
  for (const auto& it : trace.iterations) {
    std::snprintf(num, sizeof num, "%llu,%d,%zu,%.17g,%.17g,%.17g",
                  static_cast<unsigned long long>(it.label), it.core, it.i,
                  it.read_start, it.read_end, it.write_time);
    out += num;
    for (std::size_t v = 0; v < dim; ++v) {
      std::snprintf(num, sizeof num, ",%.17g", it.update[v]);
      out += num;
    }
    out += "\n";
  }
  return out;
}

}  // namespace asaga
