#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace asaga {

struct GridSpec {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 10;  // equally spaced, endpoints included
};

std::vector<double> make_grid(const GridSpec& spec);

// Default search interval [1/(10L), 10/L].
GridSpec default_grid(double L);

struct GridOutcome {
  double gamma = 0.0;
  bool diverged = false;  // non-finite or blown-up objective
  bool reached = false;   // hit the target suboptimality
  double iters_to_target = 0.0;
  double ns_to_target = 0.0;
  double final_subopt = 0.0;
};

struct GridSelection {
  std::optional<double> best_gamma;
  std::size_t best_index = 0;
  bool best_at_boundary = false;  // winner sits on the grid edge: widen it
  bool all_diverged = false;
};

// Picks the gamma minimizing iterations-to-target among runs that reached
// it (wall time breaks exact ties); falls back to the lowest final
// suboptimality among non-divergent runs when none reached the target.
GridSelection select_best(const std::vector<GridOutcome>& outcomes);

// Blow-up rule shared by the runners: non-finite value, or suboptimality
// exceeding 1e3 times the initial one.
bool diverged(double subopt, double initial_subopt);

}  // namespace asaga
