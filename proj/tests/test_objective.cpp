#include <doctest.h>

#include <cmath>
#include <vector>

#include "asaga/objective.hpp"
#include "asaga/rng.hpp"
#include "support/test_problems.hpp"

using namespace asaga;

namespace {

std::vector<double> random_point(std::size_t d, std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<double> x(d);
  for (auto& v : x) v = 2.0 * rng.next_unit() - 1.0;
  return x;
}

// central finite difference of the objective value along coordinate v
double fd_gradient(const Objective& obj, std::vector<double> x, std::size_t v,
                   double h) {
  x[v] += h;
  const double up = obj.value(x);
  x[v] -= 2.0 * h;
  const double dn = obj.value(x);
  return (up - dn) / (2.0 * h);
}

}  // namespace

TEST_CASE("full gradient matches finite differences") {
  const auto ds = testprob::random_sparse(30, 7, 4, 5);
  const Objective obj(ds, 0.05);
  for (std::uint64_t s = 0; s < 3; ++s) {
    const auto x = random_point(obj.d(), 100 + s);
    const auto g = obj.full_gradient(x);
    for (std::size_t v = 0; v < obj.d(); ++v)
      CHECK(g[v] == doctest::Approx(fd_gradient(obj, x, v, 1e-6))
                        .epsilon(1e-5));
  }
}

TEST_CASE("per-sample gradient scalar matches finite differences") {
  const auto ds = testprob::random_sparse(10, 5, 3, 9);
  const Objective obj(ds, 0.1);  // the loss part is checked on its own
  const auto x = random_point(obj.d(), 4);
  for (std::size_t i = 0; i < obj.n(); ++i) {
    const auto row = ds.row(i);
    const auto partial = obj.partial_gradient(i, x);
    REQUIRE(partial.size() == row.size());
    for (std::size_t k = 0; k < row.size(); ++k) {
      const std::uint32_t v = row.indices[k];
      CHECK(partial[k].first == v);
      // d/dx_v log(1+exp(-b a'x)) via central differences
      auto xp = x;
      const double h = 1e-6;
      xp[v] += h;
      const double up = loss_value(ds.labels[i], obj.dot_row(i, xp));
      xp[v] -= 2.0 * h;
      const double dn = loss_value(ds.labels[i], obj.dot_row(i, xp));
      CHECK(partial[k].second ==
            doctest::Approx((up - dn) / (2.0 * h)).epsilon(1e-5));
    }
  }
}

TEST_CASE("value equals mean loss plus ridge") {
  const auto ds = testprob::from_rows({{1.0, 0.0}, {0.0, 2.0}}, {1.0, -1.0});
  const Objective obj(ds, 0.5);
  const std::vector<double> x = {0.3, -0.2};
  const double expected = 0.5 * (loss_value(1.0, 0.3) + loss_value(-1.0, -0.4)) +
                          0.25 * (0.09 + 0.04);
  CHECK(obj.value(x) == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("support-projected average is the identity on covered dimensions") {
  // (1/n) sum_i D_i w = w: the reweighting 1/p_v exactly cancels the
  // support frequency by construction of inv_p
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CounterRng rng(seed * 31 + 7);
    const std::size_t n = 5 + rng.next_index(46);   // <= 50
    const std::size_t d = 2 + rng.next_index(19);   // <= 20
    const std::size_t nnz = 1 + rng.next_index(d);
    const auto ds = testprob::random_covering(n, d, nnz, seed);
    const Objective obj(ds, 0.1);
    for (int rep = 0; rep < 100; ++rep) {
      const auto w = random_point(d, seed * 1000 + rep);
      std::vector<double> acc(d, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (const auto& [v, val] : obj.project_average(w, i)) acc[v] += val;
      for (std::size_t v = 0; v < d; ++v) {
        const double got = acc[v] / static_cast<double>(n);
        CHECK(std::abs(got - w[v]) <= 1e-12 * std::max(1.0, std::abs(w[v])));
      }
    }
  }
}

TEST_CASE("accumulate+finalize equals the full gradient bitwise") {
  const auto ds = testprob::random_sparse(20, 6, 3, 2);
  const Objective obj(ds, 0.2);
  const auto x = random_point(obj.d(), 8);
  std::vector<double> acc(obj.d(), 0.0), scal(obj.n()), g;
  obj.accumulate_rows(x, 0, obj.n(), acc, scal.data());
  obj.finalize_gradient(acc, x, g);
  CHECK(g == obj.full_gradient(x));
  for (std::size_t i = 0; i < obj.n(); ++i)
    CHECK(scal[i] == obj.grad_scalar(i, x));
}

TEST_CASE("estimator second moment: brute force") {
  const auto ds = testprob::random_covering(12, 5, 3, 6);
  const Objective obj(ds, 0.3);
  const auto& inv_p = obj.stats().inv_p;
  const auto x = random_point(obj.d(), 21);
  double sum = 0.0;
  for (std::size_t i = 0; i < obj.n(); ++i) {
    std::vector<double> gi(obj.d(), 0.0);
    for (const auto& [v, val] : obj.partial_gradient(i, x)) gi[v] += val;
    const auto row = ds.row(i);
    for (std::size_t k = 0; k < row.size(); ++k) {
      const std::uint32_t v = row.indices[k];
      gi[v] += obj.mu() * inv_p[v] * x[v];
    }
    for (double gv : gi) sum += gv * gv;
  }
  CHECK(obj.sum_sq_estimator(x) == doctest::Approx(sum).epsilon(1e-12));
  CHECK(obj.sigma_sq(x) ==
        doctest::Approx(sum / static_cast<double>(obj.n())).epsilon(1e-12));
}

TEST_CASE("identical rows have zero estimator variance everywhere") {
  const auto ds = testprob::identical_rows(8, {0.5, -1.0, 0.25}, 1.0);
  const Objective obj(ds, 0.1);
  // all samples coincide, mu-term projections coincide; variance about the
  // mean is zero, so the second moment equals ||f'(x)||^2
  const auto x = random_point(obj.d(), 3);
  const auto g = obj.full_gradient(x);
  double norm_sq = 0.0;
  for (double gv : g) norm_sq += gv * gv;
  CHECK(obj.sigma_sq(x) == doctest::Approx(norm_sq).epsilon(1e-12));
}

TEST_CASE("unbiasedness: averaged estimator equals the full gradient") {
  const auto ds = testprob::random_covering(15, 6, 4, 13);
  const Objective obj(ds, 0.2);
  const auto& inv_p = obj.stats().inv_p;
  const auto x = random_point(obj.d(), 17);
  std::vector<double> mean(obj.d(), 0.0);
  for (std::size_t i = 0; i < obj.n(); ++i) {
    for (const auto& [v, val] : obj.partial_gradient(i, x)) mean[v] += val;
    const auto row = ds.row(i);
    for (std::size_t k = 0; k < row.size(); ++k) {
      const std::uint32_t v = row.indices[k];
      mean[v] += obj.mu() * inv_p[v] * x[v];
    }
  }
  const auto g = obj.full_gradient(x);
  for (std::size_t v = 0; v < obj.d(); ++v)
    CHECK(mean[v] / static_cast<double>(obj.n()) ==
          doctest::Approx(g[v]).epsilon(1e-12));
}

TEST_CASE("kappa and constructor guards") {
  const auto ds = testprob::random_sparse(10, 4, 2, 1);
  CHECK_THROWS(Objective(ds, -1.0));
  const Objective obj(ds, 0.25);
  CHECK(obj.kappa() == doctest::Approx(obj.L() / 0.25));
  CHECK(obj.L() == doctest::Approx(lipschitz_constant(ds, 0.25)));
}
