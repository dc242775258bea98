#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "asaga/atomic_cells.hpp"
#include "asaga/metrics.hpp"
#include "asaga/objective.hpp"

namespace asaga {

enum class AsyncAlgo { ASAGA, KROMAGNON, AHSVRG, HOGWILD };

std::string algo_name(AsyncAlgo a);

struct AsyncConfig {
  AsyncAlgo algorithm = AsyncAlgo::ASAGA;
  std::size_t workers = 1;
  double gamma = 0.0;
  std::size_t m = 0;  // Kromagnon inner-epoch length; 0 picks 2n
  std::uint64_t seed = 0;  // worker w draws from stream seed + w
  std::size_t max_epochs = 50;
  std::optional<double> target_subopt;
  double fstar = 0.0;
  AtomicMode atomic_mode = AtomicMode::CAS;
  // Validation mode: snapshot the full x and every memory scalar, then
  // sample; the average gradient is recomputed from the snapshot instead of
  // read from the maintained accumulator. Quadratic-cost, small-d only.
  bool read_all_then_sample = false;
  std::size_t check_period = 0;  // 0 picks max(1, n/10) global tickets
  bool record_trace = true;
  bool measure_overlap = false;
  std::size_t overlap_window = 100;
  // Records every (coordinate, delta) each worker adds to x, so a serial
  // replay can audit that no update was lost. Small runs only.
  bool log_deltas = false;
  // Called by each worker on its own thread before it starts iterating
  // (instrumentation hook; tests use it to install per-thread timers).
  std::function<void(int)> worker_start_hook;
};

// The concurrently mutated state: x, the per-sample memory scalars, and the
// maintained average live in atomic cells; reference structures for the
// epoch-based algorithms are plain vectors rebuilt at synchronization points.
struct SharedState {
  AtomicCells x;
  AtomicCells alpha_scalars;
  AtomicCells abar;
  std::vector<double> ref_x, ref_grad, ref_scalars;
  std::atomic<int> s{0};  // batch-phase request flag
  std::atomic<bool> done{false};
  std::atomic<std::uint64_t> ticket{0};

  SharedState(std::size_t d, std::size_t n)
      : x(d), alpha_scalars(n), abar(d) {}
};

struct AsyncRunResult {
  std::vector<double> x;  // final snapshot after all workers joined
  std::vector<double> alpha_scalars;
  std::vector<double> abar;
  RunTrace trace;
  OverlapData overlap;
  std::vector<std::vector<std::pair<std::uint32_t, double>>> delta_log;
  double final_subopt_raw = 0.0;
  bool converged = false;
  std::uint64_t iterations = 0;  // claimed and executed tickets
};

AsyncRunResult run_async(const Objective& obj, const AsyncConfig& cfg,
                         std::vector<double> x0 = {});

// Update direction of the read-all-then-sample mode for sample i against a
// frozen state: the memory average is recomputed from the scalars through
// the column view rather than read from the maintained accumulator.
// Averaging this direction over all i recovers the full gradient at xhat
// exactly; returns (coordinate, direction) pairs on the sample's support.
std::vector<std::pair<std::uint32_t, double>> strict_update_direction(
    const Objective& obj, const ColumnView& columns,
    const std::vector<double>& xhat,
    const std::vector<double>& alpha_scalars, std::size_t i);

}  // namespace asaga
