#include "asaga/objective.hpp"

#include <algorithm>
#include <stdexcept>

namespace asaga {

Objective::Objective(SparseDataset data, double mu)
    : data_(std::move(data)),
      stats_(support_stats(data_)),
      mu_(mu),
      L_(lipschitz_constant(data_, mu)) {
  if (!(mu > 0.0)) throw std::invalid_argument("mu must be positive");
}

double Objective::dot_row(std::size_t i, const std::vector<double>& x) const {
  const auto r = data_.row(i);
  double dot = 0.0;
  for (std::size_t k = 0; k < r.size(); ++k)
    dot += r.values[k] * x[r.indices[k]];
  return dot;
}

std::vector<std::pair<std::uint32_t, double>> Objective::partial_gradient(
    std::size_t i, const std::vector<double>& x) const {
  const double s = grad_scalar(i, x);
  const auto r = data_.row(i);
  std::vector<std::pair<std::uint32_t, double>> g;
  g.reserve(r.size());
  for (std::size_t k = 0; k < r.size(); ++k)
    g.emplace_back(r.indices[k], s * r.values[k]);
  return g;
}

void Objective::accumulate_rows(const std::vector<double>& x, std::size_t lo,
                                std::size_t hi, std::vector<double>& acc,
                                double* scalars_out) const {
  for (std::size_t i = lo; i < hi; ++i) {
    const double s = grad_scalar(i, x);
    if (scalars_out) scalars_out[i] = s;
    const auto r = data_.row(i);
    for (std::size_t k = 0; k < r.size(); ++k)
      acc[r.indices[k]] += s * r.values[k];
  }
}

void Objective::finalize_gradient(const std::vector<double>& acc,
                                  const std::vector<double>& x0,
                                  std::vector<double>& g) const {
  const auto n = static_cast<double>(data_.n);
  g.resize(data_.d);
  for (std::size_t v = 0; v < data_.d; ++v) g[v] = acc[v] / n + mu_ * x0[v];
}

std::vector<double> Objective::full_gradient(
    const std::vector<double>& x) const {
  std::vector<double> acc(data_.d, 0.0);
  accumulate_rows(x, 0, data_.n, acc);
  std::vector<double> g;
  finalize_gradient(acc, x, g);
  return g;
}

double Objective::value(const std::vector<double>& x) const {
  double loss = 0.0;
  for (std::size_t i = 0; i < data_.n; ++i)
    loss += loss_value(data_.labels[i], dot_row(i, x));
  double sq = 0.0;
  for (double xv : x) sq += xv * xv;
  return loss / static_cast<double>(data_.n) + 0.5 * mu_ * sq;
}

Suboptimality Objective::suboptimality(const std::vector<double>& x,
                                       double fstar) const {
  Suboptimality s;
  s.raw = value(x) - fstar;
  s.clamped = std::max(s.raw, 0.0);
  return s;
}

std::vector<std::pair<std::uint32_t, double>> Objective::project_average(
    const std::vector<double>& abar, std::size_t i) const {
  const auto r = data_.row(i);
  std::vector<std::pair<std::uint32_t, double>> out;
  out.reserve(r.size());
  for (std::size_t k = 0; k < r.size(); ++k) {
    const std::uint32_t v = r.indices[k];
    out.emplace_back(v, stats_.inv_p[v] * abar[v]);
  }
  return out;
}

double Objective::sum_sq_estimator(const std::vector<double>& x) const {
  double total = 0.0;
  for (std::size_t i = 0; i < data_.n; ++i) {
    const double s = grad_scalar(i, x);
    const auto r = data_.row(i);
    double sq = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) {
      const std::uint32_t v = r.indices[k];
      const double gv = s * r.values[k] + mu_ * stats_.inv_p[v] * x[v];
      sq += gv * gv;
    }
    total += sq;
  }
  return total;
}

}  // namespace asaga
