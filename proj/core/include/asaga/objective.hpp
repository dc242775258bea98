#pragma once

#include <utility>
#include <vector>

#include "asaga/dataset.hpp"
#include "asaga/kernels.hpp"

namespace asaga {

// Per-sample historical gradients of the data loss are rank-one in a_i, so
// the memory stores one scalar s_i per sample: alpha_i = s_i * a_i. The
// regularizer term is applied at step time and never stored.
struct GradMemory {
  std::vector<double> scalars;

  explicit GradMemory(std::size_t n = 0) : scalars(n, 0.0) {}
};

struct Suboptimality {
  double raw = 0.0;      // f(x) - fstar, sign preserved
  double clamped = 0.0;  // max(raw, 0)
};

// l2-regularized logistic regression over a fixed dataset:
//   f(x) = (1/n) sum_i log(1 + exp(-b_i a_i'x)) + (mu/2)||x||^2.
// The stochastic estimators project the regularizer through D_i = P_{S_i}/p
// so that sparse updates stay unbiased.
class Objective {
 public:
  Objective(SparseDataset data, double mu);

  const SparseDataset& data() const { return data_; }
  const SupportStats& stats() const { return stats_; }
  double mu() const { return mu_; }
  double L() const { return L_; }
  double kappa() const { return L_ / mu_; }
  std::size_t n() const { return data_.n; }
  std::size_t d() const { return data_.d; }

  // a_i'x over the sample's support, entries visited in index order.
  double dot_row(std::size_t i, const std::vector<double>& x) const;

  // scalar s with d(loss_i)/dx = s * a_i at the given point
  double grad_scalar(std::size_t i, const std::vector<double>& x) const {
    return loss_scalar(data_.labels[i], dot_row(i, x));
  }

  // Data-loss part of sample i's gradient on its support (no regularizer;
  // the mu*D_i x term belongs to the solver step).
  std::vector<std::pair<std::uint32_t, double>> partial_gradient(
      std::size_t i, const std::vector<double>& x) const;

  // (1/n) sum_i loss_i'(x) + mu x, one deterministic batch pass
  std::vector<double> full_gradient(const std::vector<double>& x) const;

  // Row-range accumulation used by both the serial batch gradient and the
  // partitioned parallel one: acc[v] += s_i * a_{i,v} for i in [lo, hi),
  // rows ascending; optionally records each s_i. Callers zero-init acc.
  void accumulate_rows(const std::vector<double>& x, std::size_t lo,
                       std::size_t hi, std::vector<double>& acc,
                       double* scalars_out = nullptr) const;

  // g[v] = acc[v]/n + mu*x0[v]; the shared finalization of a batch pass
  void finalize_gradient(const std::vector<double>& acc,
                         const std::vector<double>& x0,
                         std::vector<double>& g) const;

  double value(const std::vector<double>& x) const;

  Suboptimality suboptimality(const std::vector<double>& x,
                              double fstar) const;

  // [out]_v = abar_v / p_v on S_i (the D_i projection of the average)
  std::vector<std::pair<std::uint32_t, double>> project_average(
      const std::vector<double>& abar, std::size_t i) const;

  // sum_i ||loss_i'(x) + mu D_i x||^2; divide by n for the estimator
  // variance at x (sigma^2 when x = x*)
  double sum_sq_estimator(const std::vector<double>& x) const;
  double sigma_sq(const std::vector<double>& x) const {
    return sum_sq_estimator(x) / static_cast<double>(data_.n);
  }

 private:
  SparseDataset data_;
  SupportStats stats_;
  double mu_;
  double L_;
};

}  // namespace asaga
