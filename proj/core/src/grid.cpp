#include "asaga/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace asaga {

std::vector<double> make_grid(const GridSpec& spec) {
  if (!(spec.lo > 0.0) || !(spec.hi >= spec.lo))
    throw std::invalid_argument("grid needs 0 < lo <= hi");
  if (spec.count == 0) throw std::invalid_argument("grid needs count >= 1");
  std::vector<double> grid;
  grid.reserve(spec.count);
  if (spec.count == 1) {
    grid.push_back(spec.lo);
    return grid;
  }
  const double step =
      (spec.hi - spec.lo) / static_cast<double>(spec.count - 1);
  for (std::size_t k = 0; k < spec.count; ++k)
    grid.push_back(spec.lo + static_cast<double>(k) * step);
  grid.back() = spec.hi;  // pin the endpoint despite rounding
  return grid;
}

GridSpec default_grid(double L) {
  if (!(L > 0.0)) throw std::invalid_argument("L must be positive");
  GridSpec spec;
  spec.lo = 1.0 / (10.0 * L);
  spec.hi = 10.0 / L;
  spec.count = 10;
  return spec;
}

GridSelection select_best(const std::vector<GridOutcome>& outcomes) {
  GridSelection sel;
  if (outcomes.empty()) {
    sel.all_diverged = true;
    return sel;
  }
  bool any_alive = false;
  std::size_t best_reached = outcomes.size();
  std::size_t best_alive = outcomes.size();
  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    const auto& o = outcomes[k];
    if (o.diverged) continue;
    any_alive = true;
    if (o.reached) {
      if (best_reached == outcomes.size() ||
          o.iters_to_target < outcomes[best_reached].iters_to_target ||
          (o.iters_to_target == outcomes[best_reached].iters_to_target &&
           o.ns_to_target < outcomes[best_reached].ns_to_target)) {
        best_reached = k;
      }
    }
    if (best_alive == outcomes.size() ||
        o.final_subopt < outcomes[best_alive].final_subopt) {
      best_alive = k;
    }
  }
  if (!any_alive) {
    sel.all_diverged = true;
    return sel;
  }
  sel.best_index = best_reached != outcomes.size() ? best_reached : best_alive;
  sel.best_gamma = outcomes[sel.best_index].gamma;
  sel.best_at_boundary =
      outcomes.size() > 1 &&
      (sel.best_index == 0 || sel.best_index + 1 == outcomes.size());
  return sel;
}

bool diverged(double subopt, double initial_subopt) {
  if (!std::isfinite(subopt)) return true;
  return subopt > 1e3 * initial_subopt;
}

}  // namespace asaga
