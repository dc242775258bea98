#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace asaga {

// Tiny quadratic test objective for the interleaving simulator: factor i is
// (1/2)||x - c_i||^2 restricted to its support, so gradients are closed-form
// and the full gradient is the factor mean.
struct ToyProblem {
  struct Factor {
    std::vector<std::uint32_t> support;  // strictly increasing
    std::vector<double> center;          // values on the support
  };
  std::size_t dim = 1;
  std::vector<Factor> factors;

  // dense gradient of factor i at x: (x - c_i) on the support, 0 elsewhere
  std::vector<double> factor_gradient(std::size_t i,
                                      const std::vector<double>& x) const;
  std::vector<double> mean_gradient(const std::vector<double>& x) const;
};

enum class Labeling { AFTER_WRITE, BEFORE_READ, AFTER_READ };

// Logical-time schedule: each core runs iterations back to back; one
// iteration reads x (read_duration time units), samples a factor, computes
// for compute_duration[i], then writes its update instantaneously. Ties are
// broken by core id, and simultaneous writes land before reads, so every
// schedule is fully deterministic given the sampled factors.
struct ScheduleScript {
  std::size_t cores = 2;
  Labeling labeling = Labeling::AFTER_READ;
  std::size_t horizon = 2;  // labeled iterations to record
  double read_duration = 0.0;
  // Optional per-core read durations (size == cores, entries >= 0); when
  // nonempty it overrides read_duration. A slow reader next to a fast
  // read-write loop is what lets start-order labels see "future" updates.
  std::vector<double> per_core_read_duration;
  std::vector<double> compute_duration;  // per factor, strictly positive
  std::uint64_t seed = 0;
  // When nonempty, core c's j-th sample is forced_samples[c][j] and the RNG
  // is bypassed (used for exact branch enumeration).
  std::vector<std::vector<std::size_t>> forced_samples;
};

struct LabeledIteration {
  std::uint64_t label = 0;
  int core = 0;
  std::size_t i = 0;
  double read_start = 0.0;
  double read_end = 0.0;
  double write_time = 0.0;
  std::vector<double> xhat;    // snapshot seen by the read
  std::vector<double> update;  // gradient written (before -gamma scaling)
};

struct LabeledTrace {
  std::vector<LabeledIteration> iterations;  // sorted by label
  // virtual iterates per the update recursion: x_{t+1} = x_t - gamma g_t
  std::vector<std::vector<double>> virtual_iterates;  // horizon+1 entries
  std::vector<double> x0;
  double gamma = 0.0;
};

LabeledTrace simulate(const ScheduleScript& script, const ToyProblem& toy,
                      double gamma, std::vector<double> x0);

// Every snapshot must equal x0 minus gamma times the sum of exactly the
// updates whose writes completed before the read (exact reconstruction).
bool snapshots_reconstruct(const LabeledTrace& trace);

// Under after-read labeling no snapshot may contain an update with a label
// >= its own ("no updates from the future").
bool after_read_no_future(const LabeledTrace& trace);

// Largest label distance between concurrent iterations: intervals
// (read_start, write_time) strictly overlapping — a read at exactly a
// write's instant sees it and is ordered after it. The structural bound on
// how stale a snapshot can be.
std::uint64_t measured_tau(const LabeledTrace& trace);

// Exact enumeration of the four equiprobable first-sample branches on two
// cores with one fast factor (0) and one slow factor (1), after-write
// labeling. Returns each branch's first virtual iterate, their mean, and
// P(i_1 = slow | i_0 = slow).
struct TwoCoreEnumeration {
  std::vector<std::vector<double>> branch_x1;
  std::vector<double> expected_x1;
  double p_second_slow_given_first_slow = 0.0;
  std::size_t branch_count = 0;
};

TwoCoreEnumeration enumerate_two_core_first_step(const ToyProblem& toy,
                                                 double gamma,
                                                 const std::vector<double>& x0,
                                                 double fast_duration,
                                                 double slow_duration);

// Monte Carlo sample of the update direction of the iteration labeled
// `label` under the scripted labeling; one simulation per seed offset.
std::vector<std::vector<double>> sample_labeled_updates(
    const ScheduleScript& script, const ToyProblem& toy, double gamma,
    const std::vector<double>& x0, std::uint64_t label, std::size_t n_samples);

std::string trace_csv(const LabeledTrace& trace);

}  // namespace asaga
