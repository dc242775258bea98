// Acceptance suite: one [PASS]/[FAIL] line per criterion, nonzero exit if
// any check fails. Every tolerance is pinned in code next to its check.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <string>
#include <thread>
#include <vector>

#include "asaga/async.hpp"
#include "asaga/atomic_cells.hpp"
#include "asaga/dataset.hpp"
#include "asaga/labeling.hpp"
#include "asaga/metrics.hpp"
#include "asaga/objective.hpp"
#include "asaga/rng.hpp"
#include "asaga/serial.hpp"
#include "asaga/theory.hpp"

#include "support/preempt_fuzz.hpp"
#include "support/test_problems.hpp"

using namespace asaga;

namespace {

int g_failures = 0;

using WallClock = std::chrono::steady_clock;

double seconds_since(WallClock::time_point t0) {
  return std::chrono::duration<double>(WallClock::now() - t0).count();
}

void report(const char* criterion, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %s: %s\n", pass ? "PASS" : "FAIL", criterion,
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v.empty() ? 0.0 : v[v.size() / 2];
}

double dist_sq(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t v = 0; v < a.size(); ++v)
    s += (a[v] - b[v]) * (a[v] - b[v]);
  return s;
}

// Random sparse rows relabeled by the sign of a planted linear model. The
// problem is then actually learnable: the starting suboptimality is large
// and the gradient variance at the optimum is moderate, which is what the
// target-reaching criteria need.
SparseDataset planted(std::size_t n, std::size_t d, std::size_t max_nnz,
                      std::uint64_t seed) {
  auto ds = testprob::random_covering(n, d, max_nnz, seed);
  CounterRng rng(seed * 7919 + 13);
  std::vector<double> model(d);
  for (auto& v : model)
    v = (rng.next_bernoulli(0.5) ? 1.0 : -1.0) * (0.5 + 0.5 * rng.next_unit());
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = ds.row(i);
    double dot = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k)
      dot += r.values[k] * model[r.indices[k]];
    ds.labels[i] = dot >= 0.0 ? 1.0 : -1.0;
  }
  return ds;
}

// ---------------------------------------------------------------------
// 1. Two-core first-step bias: exact enumeration of the write-order
//    labeling gives a 3/4 - 1/4 mixture instead of the uniform average;
//    the read-order labeling is unbiased to Monte Carlo accuracy.
// ---------------------------------------------------------------------
void criterion1() {
  const auto t0 = WallClock::now();
  ToyProblem toy;
  toy.dim = 2;
  toy.factors = {{{0, 1}, {1.0, 0.5}}, {{0, 1}, {-1.0, 2.0}}};
  const std::vector<double> x0 = {0.0, 0.0};
  const double gamma = 0.1;
  const auto g_fast = toy.factor_gradient(0, x0);
  const auto g_slow = toy.factor_gradient(1, x0);

  const auto e = enumerate_two_core_first_step(toy, gamma, x0, 1.0, 2.0);
  bool enum_ok = e.branch_count == 4;
  double enum_dev = 0.0;
  for (std::size_t v = 0; v < toy.dim; ++v) {
    const double expect =
        x0[v] - gamma * (0.75 * g_fast[v] + 0.25 * g_slow[v]);
    enum_dev = std::max(enum_dev, std::abs(e.expected_x1[v] - expect));
  }
  enum_ok = enum_ok && enum_dev <= 1e-15;  // exact enumeration, fp assoc only

  ScheduleScript script;
  script.cores = 2;
  script.labeling = Labeling::AFTER_READ;
  script.horizon = 2;
  script.compute_duration = {1.0, 2.0};
  script.seed = 9001;
  const std::size_t samples = 100000;
  const auto updates =
      sample_labeled_updates(script, toy, gamma, x0, 0, samples);
  const auto truth = toy.mean_gradient(x0);
  bool mc_ok = true;
  double worst_z = 0.0;
  for (std::size_t v = 0; v < toy.dim; ++v) {
    double mean = 0.0;
    for (const auto& u : updates) mean += u[v];
    mean /= static_cast<double>(samples);
    double var = 0.0;
    for (const auto& u : updates) var += (u[v] - mean) * (u[v] - mean);
    var /= static_cast<double>(samples);
    const double se = std::sqrt(var / static_cast<double>(samples));
    const double dev = std::abs(mean - truth[v]);
    if (se > 0.0) {
      worst_z = std::max(worst_z, dev / se);
      if (dev > 3.0 * se) mc_ok = false;
    } else if (dev != 0.0) {
      mc_ok = false;
    }
  }
  const double secs = seconds_since(t0);
  report("1", enum_ok && mc_ok && secs < 5.0,
         fmt("enumeration dev %.2e (<=1e-15), read-order MC worst |z| %.2f "
             "(<=3), %.1fs (<5s)",
             enum_dev, worst_z, secs));
}

// ---------------------------------------------------------------------
// 2. Support-projected averaging identity: (1/n) sum_i D_i w == w within
//    1e-12 relative error, 100 random vectors x 20 random datasets.
// ---------------------------------------------------------------------
void criterion2() {
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const std::size_t n = 20 + (s * 7) % 31;  // <= 50
    const std::size_t d = 5 + (s * 3) % 16;   // <= 20
    const Objective obj(testprob::random_covering(n, d, 3 + s % 4, 100 + s),
                        0.1);
    CounterRng rng(7000 + s);
    std::vector<double> w(d), acc(d);
    for (int rep = 0; rep < 100; ++rep) {
      for (auto& wv : w) wv = 4.0 * rng.next_unit() - 2.0;
      std::fill(acc.begin(), acc.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (const auto& [v, val] : obj.project_average(w, i)) acc[v] += val;
      for (std::size_t v = 0; v < d; ++v) {
        const double rel = std::abs(acc[v] / static_cast<double>(n) - w[v]) /
                           std::max(std::abs(w[v]), 1e-12);
        worst = std::max(worst, rel);
      }
    }
  }
  report("2", worst <= 1e-12,
         fmt("worst relative deviation %.2e (<=1e-12), 20 datasets x 100 "
             "vectors",
             worst));
}

// ---------------------------------------------------------------------
// 3. Bitwise solver equivalences.
// ---------------------------------------------------------------------
void criterion3a() {
  const Objective obj(testprob::random_dense(40, 12, 3), 0.05);
  SolverConfig cfg;
  cfg.gamma = 1.0 / (3.0 * obj.L());
  auto sa = make_serial_state(obj, cfg);
  auto sb = make_serial_state(obj, cfg);
  CounterRng rng(9);
  bool ok = true;
  for (int step = 0; step < 10000 && ok; ++step) {
    const std::size_t i = rng.next_index(obj.n());
    saga_dense_step(obj, cfg, sa, i);
    sparse_saga_step(obj, cfg, sb, i);
    ok = sa.x == sb.x;
  }
  ok = ok && sa.alpha.scalars == sb.alpha.scalars && sa.abar == sb.abar;
  report("3a", ok,
         "projected-support rule == dense rule, bit for bit, 1e4 steps on "
         "fully dense data");
}

void criterion3b() {
  const Objective obj(testprob::random_covering(50, 15, 4, 21), 0.02);
  SolverConfig dense_cfg;
  dense_cfg.algorithm = SerialAlgo::SAGA_DENSE;
  dense_cfg.gamma = 1.0 / (3.0 * obj.L());
  SolverConfig lag_cfg = dense_cfg;
  lag_cfg.algorithm = SerialAlgo::SAGA_LAGGED;
  auto dense = make_serial_state(obj, dense_cfg);
  auto lag = make_serial_state(obj, lag_cfg);
  CounterRng rng(31);
  for (int step = 0; step < 10000; ++step) {
    const std::size_t i = rng.next_index(obj.n());
    saga_dense_step(obj, dense_cfg, dense, i);
    saga_lagged_step(obj, lag_cfg, lag, i);
  }
  saga_lagged_finalize(obj, lag_cfg, lag);
  const bool ok = dense.x == lag.x &&
                  dense.alpha.scalars == lag.alpha.scalars &&
                  dense.abar == lag.abar;
  report("3b", ok,
         "postponed per-coordinate updates + finalize == dense rule, bit "
         "for bit, 1e4 steps on sparse data");
}

bool async_matches_serial(const Objective& obj, AsyncAlgo aa, SerialAlgo sa,
                          double gamma, std::size_t m) {
  AsyncConfig ac;
  ac.algorithm = aa;
  ac.workers = 1;
  ac.gamma = gamma;
  ac.m = m;
  ac.seed = 3;
  ac.max_epochs = 3;
  ac.check_period = 20;
  SolverConfig sc;
  sc.algorithm = sa;
  sc.gamma = gamma;
  sc.m = m;
  sc.seed = 3;
  sc.max_epochs = 3;
  sc.check_period = 20;
  const auto ra = run_async(obj, ac);
  const auto rs = run_serial(obj, sc);
  if (ra.x != rs.state.x) return false;
  if (ra.trace.records.size() != rs.trace.records.size()) return false;
  for (std::size_t k = 0; k < ra.trace.records.size(); ++k) {
    if (ra.trace.records[k].ticket != rs.trace.records[k].ticket ||
        ra.trace.records[k].subopt != rs.trace.records[k].subopt)
      return false;
  }
  if (aa == AsyncAlgo::ASAGA &&
      (ra.alpha_scalars != rs.state.alpha.scalars ||
       ra.abar != rs.state.abar))
    return false;
  return true;
}

void criterion3c() {
  const Objective obj(testprob::random_covering(60, 12, 4, 33), 1.0 / 60.0);
  const double gamma = 1.0 / (4.0 * obj.L());
  bool ok = true;
  ok = ok && async_matches_serial(obj, AsyncAlgo::ASAGA,
                                  SerialAlgo::SAGA_SPARSE, gamma, 0);
  ok = ok && async_matches_serial(obj, AsyncAlgo::HOGWILD, SerialAlgo::SGD,
                                  gamma, 0);
  ok = ok && async_matches_serial(obj, AsyncAlgo::KROMAGNON,
                                  SerialAlgo::SVRG, gamma, 50);
  ok = ok && async_matches_serial(obj, AsyncAlgo::AHSVRG,
                                  SerialAlgo::SVRG_HOFMANN, gamma, 0);
  report("3c", ok,
         "all four concurrent algorithms at p=1 == serial counterparts "
         "(iterates and traces, bit for bit)");
}

// ---------------------------------------------------------------------
// 4. Linear-rate envelope with the closed-form constant:
//    E||x_t - x*||^2 <= (1-rho)^t C0, rho = (1/5) min{1/n, 1/kappa},
//    C0 = ||x0-x*||^2 + (1/(5L^2)) sum_i ||alpha_i^0 - f_i'(x*)||^2.
// ---------------------------------------------------------------------
void criterion4() {
  const auto t0 = WallClock::now();
  const std::size_t n = 500, d = 50;
  const double mu = 1.0 / static_cast<double>(n);
  const Objective obj(testprob::random_covering(n, d, 10, 77), mu);
  const auto ref = reference_solve(obj);
  const auto& xs = ref.x_star;
  const double L = obj.L();
  const double gamma = 1.0 / (5.0 * L);
  const double rho =
      0.2 * std::min(1.0 / static_cast<double>(n), 1.0 / obj.kappa());

  double xs_sq = 0.0;
  for (double v : xs) xs_sq += v * v;
  // alpha^0 = 0, so the memory term is sum_i ||f_i'(x*)||^2 with the full
  // per-sample gradient s_i a_i + mu x*.
  double mem = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = obj.grad_scalar(i, xs);
    const auto r = obj.data().row(i);
    double row_sq = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k)
      row_sq += r.values[k] * r.values[k];
    mem += s * s * row_sq + 2.0 * mu * s * obj.dot_row(i, xs) +
           mu * mu * xs_sq;
  }
  const double c0 = xs_sq + mem / (5.0 * L * L);

  const std::size_t epochs = 60;
  const std::size_t total = epochs * n;
  const std::size_t period = 50;
  std::vector<double> mean_sq(total / period + 1, 0.0);
  SolverConfig cfg;
  cfg.gamma = gamma;
  const std::size_t n_seeds = 10;
  for (std::uint64_t seed = 0; seed < n_seeds; ++seed) {
    auto st = make_serial_state(obj, cfg);
    CounterRng rng(1000 + seed);
    mean_sq[0] += dist_sq(st.x, xs);
    for (std::size_t t = 1; t <= total; ++t) {
      sparse_saga_step(obj, cfg, st, rng.next_index(n));
      if (t % period == 0) mean_sq[t / period] += dist_sq(st.x, xs);
    }
  }
  bool ok = true;
  double worst_ratio = 0.0;
  for (std::size_t k = 0; k < mean_sq.size(); ++k) {
    const double avg = mean_sq[k] / static_cast<double>(n_seeds);
    const double envelope =
        std::pow(1.0 - rho, static_cast<double>(k * period)) * c0;
    worst_ratio = std::max(worst_ratio, avg / envelope);
    if (avg > envelope) ok = false;
  }
  const double secs = seconds_since(t0);
  report("4", ok && secs < 60.0,
         fmt("10-seed averaged ||x_t-x*||^2 under the (1-rho)^t C0 envelope "
             "at every checkpoint (worst ratio %.3f), %.1fs (<60s)",
             worst_ratio, secs));
}

// ---------------------------------------------------------------------
// 5. Lossless accumulation under forced preemption: CAS sums are exact in
//    every run; the racy read-then-store mode loses updates in >= 18/20.
// ---------------------------------------------------------------------
bool stress_exact(std::size_t p, unsigned interval_us, AtomicMode mode,
                  std::uint64_t base) {
  constexpr std::size_t kCells = 16;
  constexpr std::uint64_t kAdds = 100000;
  AtomicCells cells(kCells);
  std::vector<double> expected(kCells, 0.0);
  for (std::size_t w = 0; w < p; ++w) {
    for (std::uint64_t k = 0; k < kAdds; ++k) {
      const std::uint64_t z = preempt::mix_at(base + w * 0x10001ull, k);
      expected[(z >> 8) % kCells] += static_cast<double>(1 + (z & 7));
    }
  }
  std::vector<std::thread> threads;
  threads.reserve(p);
  for (std::size_t w = 0; w < p; ++w) {
    threads.emplace_back([&cells, base, w, p, interval_us, mode] {
      const unsigned phase =
          interval_us * static_cast<unsigned>(w + 1) /
          static_cast<unsigned>(p + 1);
      const timer_t t = preempt::arm(interval_us, phase);
      for (std::uint64_t k = 0; k < kAdds; ++k) {
        const std::uint64_t z = preempt::mix_at(base + w * 0x10001ull, k);
        cells.add((z >> 8) % kCells, static_cast<double>(1 + (z & 7)), mode);
      }
      preempt::disarm(t);
    });
  }
  for (auto& t : threads) t.join();
  return cells.snapshot() == expected;
}

void criterion5() {
  bool all_ok = true;
  std::string detail;
  for (std::size_t p : {2, 4, 8}) {
    const unsigned interval_us = p == 2 ? 200 : 400;
    preempt::g_park_ns = p == 2 ? 40000 : 25000;
    bool cas_exact = true;
    int unsafe_lost = 0;
    for (std::uint64_t run = 0; run < 20; ++run) {
      const std::uint64_t base = p * 1000003ull + run * 1009ull;
      cas_exact =
          stress_exact(p, interval_us, AtomicMode::CAS, base) && cas_exact;
      if (!stress_exact(p, interval_us, AtomicMode::UNSAFE,
                        base + 500009ull))
        ++unsafe_lost;
    }
    all_ok = all_ok && cas_exact && unsafe_lost >= 18;
    detail += fmt("p=%zu: CAS %s, racy mode lost %d/20 (>=18); ", p,
                  cas_exact ? "exact 20/20" : "NOT exact", unsafe_lost);
  }
  report("5", all_ok, detail);
}

// ---------------------------------------------------------------------
// 6. Convergence analogue of the same race: with 8 workers the CAS build
//    reaches 1e-10 suboptimality; the racy build plateaus >= 1e3x higher
//    in at least 4 of 5 runs.
// ---------------------------------------------------------------------
double tail_plateau(const RunTrace& trace) {
  if (trace.records.empty()) return 0.0;
  const std::uint64_t cut = trace.records.back().ticket * 3 / 4;
  double sum = 0.0;
  std::size_t cnt = 0;
  for (const auto& r : trace.records) {
    if (r.ticket >= cut) {
      sum += std::max(r.subopt, 0.0);
      ++cnt;
    }
  }
  return cnt > 0 ? sum / static_cast<double>(cnt) : 0.0;
}

void criterion6() {
  const auto t0 = WallClock::now();
  // Small n so a single lost gradient-table update shifts the maintained
  // average by O(1/n); small mu so the descent spends most of the run in
  // its transient, where update magnitudes are large enough that a lost
  // write leaves a permanent, visible bias in the table average (nothing
  // in the algorithm ever recomputes it). The racy runs then level off at
  // f-gaps set by that bias while the lock-free CAS build, on the exact
  // same problem, step size and preemption pressure, descends cleanly.
  const std::size_t n = 100;
  const Objective obj(planted(n, 100, 10, 99), 0.002);
  const auto ref = reference_solve(obj);
  preempt::g_park_ns = 10000;
  preempt::g_park_jitter = true;

  AsyncConfig cfg;
  cfg.algorithm = AsyncAlgo::ASAGA;
  cfg.workers = 8;
  cfg.gamma = 1.0 / (200.0 * obj.L());
  cfg.max_epochs = 60000;
  cfg.target_subopt = 1e-10;
  cfg.fstar = ref.fstar;
  cfg.check_period = 500;

  preempt::TimerBag bag;
  cfg.worker_start_hook = [&bag](int w) {
    bag.keep(preempt::arm(100, 100u * static_cast<unsigned>(w + 1) / 9));
  };

  cfg.atomic_mode = AtomicMode::CAS;
  cfg.seed = 11;
  const auto cas = run_async(obj, cfg);
  const double cas_final = std::max(cas.final_subopt_raw, 0.0);
  const bool cas_ok = cas.converged && cas_final <= 1e-10;

  cfg.atomic_mode = AtomicMode::UNSAFE;
  int high_plateaus = 0;
  double worst_plateau = 0.0, best_plateau = 1e300;
  for (std::uint64_t seed = 21; seed < 26; ++seed) {
    cfg.seed = seed;
    const auto res = run_async(obj, cfg);
    const double plateau =
        res.converged ? std::max(res.final_subopt_raw, 0.0)
                      : tail_plateau(res.trace);
    worst_plateau = std::max(worst_plateau, plateau);
    best_plateau = std::min(best_plateau, plateau);
    if (plateau >= 1e3 * 1e-10) ++high_plateaus;
  }
  preempt::g_park_jitter = false;
  report("6", cas_ok && high_plateaus >= 4,
         fmt("CAS final %.2e (<=1e-10) in %.0f epochs; racy plateaus "
             "[%.1e, %.1e], %d/5 runs >=1e-7; %.0fs",
             cas_final,
             static_cast<double>(cas.iterations) / static_cast<double>(n),
             best_plateau, worst_plateau, high_plateaus,
             seconds_since(t0)));
}

// ---------------------------------------------------------------------
// 7. Iteration-count speedup: per-update progress at p=8 matches p=1
//    within 15% (median of 5 seeds) for all three concurrent algorithms.
// ---------------------------------------------------------------------
double iters_to_target(const RunTrace& trace, double target) {
  for (const auto& r : trace.records)
    if (r.subopt <= target) return static_cast<double>(r.ticket);
  return -1.0;
}

void criterion7() {
  const auto t0 = WallClock::now();
  // Low max column density (~6%) and separable-ish labels. The ridge
  // weight must stay small: sparse-projected updates multiply coordinate v
  // by (1 - gamma*mu/p_v) per hit, so stability needs
  // gamma*mu*max_v(1/p_v) < 1; here that product is ~0.3 at its largest.
  const Objective obj(planted(1000, 100, 5, 55), 0.02);
  const auto ref = reference_solve(obj);
  const double L = obj.L();
  const double sigma_sq = obj.sigma_sq(ref.x_star);
  struct Setup {
    AsyncAlgo algo;
    const char* name;
    double gamma;
    double target;
    std::size_t max_epochs;
  };
  const Setup setups[] = {
      {AsyncAlgo::ASAGA, "memory-table", 1.0 / (5.0 * L), 1e-5, 100},
      {AsyncAlgo::KROMAGNON, "epoch-reference", 1.0 / (10.0 * L), 1e-5, 60},
      // constant-step stochastic descent stalls at a plateau proportional
      // to gamma*sigma^2; this step puts the plateau ~25x under the target
      {AsyncAlgo::HOGWILD, "plain-stochastic",
       std::min(1.0 / (2.0 * L),
                10.0 * 1e-3 * obj.mu() / (sigma_sq * L)),
       1e-3, 600},
  };
  bool all_ok = true;
  std::string detail;
  for (const auto& s : setups) {
    AsyncConfig cfg;
    cfg.algorithm = s.algo;
    cfg.m = 2000;
    cfg.gamma = s.gamma;
    cfg.fstar = ref.fstar;
    cfg.target_subopt = s.target;
    cfg.check_period = 100;
    cfg.max_epochs = s.max_epochs;
    double med[2] = {0.0, 0.0};
    bool reached = true;
    int slot = 0;
    for (std::size_t p : {1, 8}) {
      std::vector<double> iters;
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        cfg.workers = p;
        cfg.seed = 40 + seed;
        const auto res = run_async(obj, cfg);
        const double it = iters_to_target(res.trace, s.target);
        if (it < 0) reached = false;
        iters.push_back(it);
      }
      med[slot++] = median(iters);
    }
    const double ratio = med[1] / med[0];
    const bool ok = reached && std::abs(ratio - 1.0) <= 0.15;
    all_ok = all_ok && ok;
    detail += fmt("%s: median iters 1w=%.0f 8w=%.0f ratio %.3f; ", s.name,
                  med[0], med[1], ratio);
  }
  const double secs = seconds_since(t0);
  all_ok = all_ok && secs < 300.0;
  report("7", all_ok, detail + fmt("%.0fs (<300s)", secs));
}

// ---------------------------------------------------------------------
// 8. Noise ball: zero gradient variance at the optimum means exact
//    convergence even with 8 racing workers; positive variance gives a
//    plateau proportional to the step size (log-log slope in [0.7, 1.3]).
// ---------------------------------------------------------------------
void criterion8() {
  const Objective zero_var(
      testprob::identical_rows(32, {1.0, -0.5, 0.75, 1.25}, 1.0), 0.1);
  const auto ref0 = reference_solve(zero_var);
  AsyncConfig cfg;
  cfg.algorithm = AsyncAlgo::HOGWILD;
  cfg.workers = 8;
  cfg.gamma = 1.0 / (2.0 * zero_var.L());
  cfg.max_epochs = 1500;
  cfg.fstar = ref0.fstar;
  cfg.seed = 5;
  cfg.check_period = 64;
  const auto exact = run_async(zero_var, cfg);
  const double exact_final = std::max(exact.final_subopt_raw, 0.0);
  const bool zero_ok = exact_final < 1e-12;

  const Objective noisy(planted(64, 16, 6, 808), 0.5);
  const auto ref1 = reference_solve(noisy);
  const double L = noisy.L();
  const double gammas[] = {1.0 / (200.0 * L), 1.0 / (100.0 * L),
                           1.0 / (40.0 * L), 1.0 / (20.0 * L)};
  std::vector<double> lg, lp;
  std::string levels;
  for (double g : gammas) {
    AsyncConfig nc;
    nc.algorithm = AsyncAlgo::HOGWILD;
    nc.workers = 8;
    nc.gamma = g;
    nc.max_epochs = 1200;
    nc.fstar = ref1.fstar;
    nc.seed = 17;
    nc.check_period = 32;
    const auto res = run_async(noisy, nc);
    const double plateau = tail_plateau(res.trace);
    lg.push_back(std::log(g));
    lp.push_back(std::log(std::max(plateau, 1e-300)));
    levels += fmt("%.1e ", plateau);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < lg.size(); ++k) {
    mx += lg[k];
    my += lp[k];
  }
  mx /= static_cast<double>(lg.size());
  my /= static_cast<double>(lg.size());
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < lg.size(); ++k) {
    num += (lg[k] - mx) * (lp[k] - my);
    den += (lg[k] - mx) * (lg[k] - mx);
  }
  const double slope = num / den;
  const bool slope_ok = slope >= 0.7 && slope <= 1.3;
  report("8", zero_ok && slope_ok,
         fmt("zero-variance final %.1e (<1e-12); plateaus [%s] across 10x "
             "steps, log-log slope %.2f (in [0.7,1.3])",
             exact_final, levels.c_str(), slope));
}

// ---------------------------------------------------------------------
// 9. Closed-form calculators: serial specializations are exact and the
//    admissible step sizes shrink monotonically with the overlap bound.
// ---------------------------------------------------------------------
void criterion9() {
  bool exact_ok = true;
  for (double delta : {0.001, 0.05, 0.3, 1.0}) {
    for (double kappa : {1.5, 10.0, 1e3, 1e6}) {
      exact_ok =
          exact_ok && theory::asaga_max_a(1000000, 0, delta, kappa) ==
                          1.0 / 32.0;
      exact_ok =
          exact_ok && theory::hogwild_max_a(0, delta, kappa) == 1.0 / 5.0;
      exact_ok = exact_ok &&
                 theory::kromagnon_max_a(1000000, 0, delta, kappa).a_star ==
                     1.0 / 4.0;
      const double L = 2.0, mu = L / kappa, gamma = 1.0 / (10.0 * L);
      const std::size_t m = 500000;
      const double classical =
          (1.0 / (mu * gamma * static_cast<double>(m)) + 2.0 * L * gamma) /
          (1.0 - 2.0 * L * gamma);
      exact_ok = exact_ok &&
                 theory::svrg_theta(gamma, m, L, mu, delta, 0) == classical;
    }
  }
  bool mono_ok = true;
  CounterRng rng(2024);
  for (int k = 0; k < 1000; ++k) {
    const std::size_t tau = rng.next_index(50);
    const double delta = std::max(rng.next_unit(), 1e-4);
    const double kappa = 1.5 + rng.next_unit() * 1e5;
    const std::size_t n = 2000;
    const double a0 = theory::asaga_max_a(n, tau, delta, kappa);
    const double a1 = theory::asaga_max_a(n, tau + 1, delta, kappa);
    mono_ok = mono_ok && a1 <= a0 && a0 <= 1.0 / 32.0;
    const double h0 = theory::hogwild_max_a(tau, delta, kappa);
    const double h1 = theory::hogwild_max_a(tau + 1, delta, kappa);
    mono_ok = mono_ok && h1 <= h0 && h0 <= 1.0 / 5.0;
    const double k0 = theory::kromagnon_max_a(n, tau, delta, kappa).a_star;
    const double k1 =
        theory::kromagnon_max_a(n, tau + 1, delta, kappa).a_star;
    mono_ok = mono_ok && k1 <= k0 && k0 <= 1.0 / 4.0;
  }
  report("9", exact_ok && mono_ok,
         "serial specializations exact (1/32, 1/5, 1/4, classical epoch "
         "rate); step bounds monotone over 1000 random (tau,delta,kappa)");
}

// ---------------------------------------------------------------------
// 10. Interleaving measurement: 4 workers show median max overlap >= 3,
//     bounded by (p-1) x duration ratio; 1 worker measures exactly 0.
// ---------------------------------------------------------------------
void criterion10() {
  const Objective obj(testprob::random_covering(1000, 100, 10, 4242),
                      1.0 / 1000.0);
  AsyncConfig cfg;
  cfg.algorithm = AsyncAlgo::ASAGA;
  cfg.gamma = 1.0 / (5.0 * obj.L());
  cfg.max_epochs = 300;
  cfg.record_trace = false;
  cfg.measure_overlap = true;
  cfg.overlap_window = 100;
  bool bound_ok = true;
  std::vector<double> maxima4;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    cfg.workers = 4;
    cfg.seed = 60 + seed;
    const auto est = estimate_overlap(run_async(obj, cfg).overlap);
    maxima4.push_back(est.max_observed);
    if (est.max_observed > est.upper_bound) bound_ok = false;
  }
  double single_max = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    cfg.workers = 1;
    cfg.seed = 80 + seed;
    const auto est = estimate_overlap(run_async(obj, cfg).overlap);
    single_max = std::max(single_max, est.max_observed);
  }
  const double med4 = median(maxima4);
  report("10", med4 >= 3.0 && bound_ok && single_max == 0.0,
         fmt("4 workers: median max overlap %.0f (>=3), every run within "
             "(p-1)*R; 1 worker: max %.0f (==0)",
             med4, single_max));
}

// ---------------------------------------------------------------------
// 11. Epoch-based rate spot check at kappa = n: every per-epoch
//     suboptimality ratio <= 0.75 down to the 1e-12 floor, 5 seeds.
// ---------------------------------------------------------------------
void criterion11() {
  auto data = testprob::random_covering(200, 30, 6, 616);
  const std::size_t n = data.n;
  const double base_L = lipschitz_constant(data, 0.0);
  const double mu = base_L / static_cast<double>(n - 1);  // makes kappa = n
  const Objective obj(std::move(data), mu);
  const auto ref = reference_solve(obj);
  const std::size_t m = 20 * n;
  SolverConfig cfg;
  cfg.algorithm = SerialAlgo::SVRG;
  cfg.gamma = 1.0 / (10.0 * obj.L());
  cfg.m = m;
  cfg.max_epochs = 10;
  cfg.fstar = ref.fstar;
  cfg.check_period = m;
  bool ok = true;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    cfg.seed = seed;
    const auto res = run_serial(obj, cfg);
    std::vector<double> s;
    for (const auto& r : res.trace.records)
      if (r.ticket % m == 0) s.push_back(std::max(r.subopt, 0.0));
    std::size_t ratios = 0;
    for (std::size_t k = 0; k + 1 < s.size(); ++k) {
      if (s[k] < 1e-12) break;
      const double ratio = s[k + 1] / s[k];
      worst = std::max(worst, ratio);
      if (ratio > 0.75) ok = false;
      ++ratios;
      if (s[k + 1] < 1e-12) break;
    }
    if (ratios < 2) ok = false;
  }
  report("11", ok,
         fmt("kappa=n epoch solver: worst per-epoch ratio %.3f (<=0.75) "
             "over 5 seeds",
             worst));
}

}  // namespace

int main() {
  std::printf("=== acceptance suite ===\n");
  preempt::install_handler();
  criterion1();
  criterion2();
  criterion3a();
  criterion3b();
  criterion3c();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  criterion11();
  if (g_failures == 0) {
    std::printf("=== all criteria passed ===\n");
    return 0;
  }
  std::printf("=== %d criterion check(s) FAILED ===\n", g_failures);
  return 1;
}
