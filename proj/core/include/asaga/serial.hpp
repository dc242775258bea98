#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "asaga/metrics.hpp"
#include "asaga/objective.hpp"
#include "asaga/rng.hpp"

namespace asaga {

enum class SerialAlgo {
  SGD,
  SAGA_DENSE,
  SAGA_SPARSE,
  SAGA_LAGGED,
  SVRG,
  SVRG_HOFMANN,
};

std::string algo_name(SerialAlgo a);

struct SolverConfig {
  SerialAlgo algorithm = SerialAlgo::SAGA_SPARSE;
  double gamma = 0.0;  // >= 0; 0 runs (flat trace) but cannot converge
  std::size_t m = 0;   // SVRG inner-epoch length; 0 picks 2n
  std::uint64_t seed = 0;
  std::size_t max_epochs = 50;
  std::optional<double> target_subopt;
  double fstar = 0.0;  // reference optimum for suboptimality reporting
  // x-tilde choice at SVRG epoch end: last iterate by default, or a
  // uniformly drawn inner iterate (the analyzed variant; serial only)
  bool svrg_random_iterate = false;
  std::size_t check_period = 0;  // 0 picks max(1, n/10)
  bool record_trace = true;
};

struct SerialState {
  std::vector<double> x;
  GradMemory alpha;          // SAGA family: per-sample scalars
  std::vector<double> abar;  // SAGA family: maintained average gradient
  std::vector<double> ref_x, ref_grad, ref_scalars;  // SVRG family
  std::vector<std::uint64_t> lag_counters;  // steps applied per coordinate
  std::uint64_t t = 0;                      // completed iterations
  std::uint64_t grad_evals = 0;
  CounterRng rng{0};
};

SerialState make_serial_state(const Objective& obj, const SolverConfig& cfg,
                              std::vector<double> x0 = {});

// One iteration each; state.t advances by one. The sampled index i comes
// from the caller so trajectories and RNG streams stay decoupled.
void sgd_step(const Objective& obj, const SolverConfig& cfg,
              SerialState& state, std::size_t i);
void saga_dense_step(const Objective& obj, const SolverConfig& cfg,
                     SerialState& state, std::size_t i);
void sparse_saga_step(const Objective& obj, const SolverConfig& cfg,
                      SerialState& state, std::size_t i);
void saga_lagged_step(const Objective& obj, const SolverConfig& cfg,
                      SerialState& state, std::size_t i);
// Applies every postponed per-coordinate update; after this, x matches the
// dense-rule trajectory exactly.
void saga_lagged_finalize(const Objective& obj, const SolverConfig& cfg,
                          SerialState& state);

// Rebuilds the SVRG reference: ref_x <- x, batch gradient and per-sample
// scalars at ref_x in one pass. Counts n gradient evaluations.
void svrg_refresh(const Objective& obj, SerialState& state);
void svrg_step(const Objective& obj, const SolverConfig& cfg,
               SerialState& state, std::size_t i);
// One logical iteration of the randomized-epoch variant: draws B with
// probability 1/n; B=1 refreshes the reference (x unchanged, no index
// drawn), otherwise draws i and takes an inner step.
void hofmann_iteration(const Objective& obj, const SolverConfig& cfg,
                       SerialState& state);

struct SerialRunResult {
  SerialState state;
  RunTrace trace;
  double final_subopt_raw = 0.0;
  bool converged = false;
};

SerialRunResult run_serial(const Objective& obj, const SolverConfig& cfg,
                           std::vector<double> x0 = {});

struct ReferenceSolution {
  std::vector<double> x_star;
  double fstar = 0.0;
  double grad_norm = 0.0;
  std::size_t epochs_used = 0;
};

// High-precision optimum via long variance-reduced runs; stops when the
// full-gradient norm drops below tol.
ReferenceSolution reference_solve(const Objective& obj, double tol = 1e-12,
                                  std::size_t max_epochs = 4000);

}  // namespace asaga
