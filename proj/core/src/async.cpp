#include "asaga/async.hpp"

#include <algorithm>
#include <barrier>
#include <chrono>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <utility>

#include "asaga/rng.hpp"

namespace asaga {

std::string algo_name(AsyncAlgo a) {
  switch (a) {
    case AsyncAlgo::ASAGA: return "asaga";
    case AsyncAlgo::KROMAGNON: return "kromagnon";
    case AsyncAlgo::AHSVRG: return "ahsvrg";
    case AsyncAlgo::HOGWILD: return "hogwild";
  }
  return "unknown";
}

std::vector<std::pair<std::uint32_t, double>> strict_update_direction(
    const Objective& obj, const ColumnView& columns,
    const std::vector<double>& xhat,
    const std::vector<double>& alpha_scalars, std::size_t i) {
  const auto& data = obj.data();
  const auto& inv_p = obj.stats().inv_p;
  const double n_real = static_cast<double>(obj.n());
  const double s = obj.grad_scalar(i, xhat);
  const double ds = s - alpha_scalars[i];
  const auto row = data.row(i);
  std::vector<std::pair<std::uint32_t, double>> dir;
  dir.reserve(row.size());
  for (std::size_t k = 0; k < row.size(); ++k) {
    const std::uint32_t v = row.indices[k];
    const auto col = columns.column(v);
    double abar_v = 0.0;
    for (std::size_t c = 0; c < col.size(); ++c)
      abar_v += alpha_scalars[col.sample_ids[c]] * col.values[c];
    abar_v /= n_real;
    dir.emplace_back(v, ds * row.values[k] + inv_p[v] * abar_v +
                            obj.mu() * inv_p[v] * xhat[v]);
  }
  return dir;
}

namespace {

using Clock = std::chrono::steady_clock;

// Per-worker interleaving probe: the global labels of a worker's own
// consecutive iterations, chunked into windows, plus duration extremes.
struct OverlapLocal {
  int worker = 0;
  bool enabled = false;
  std::size_t window = 100;
  std::uint64_t first = 0, last = 0;
  std::uint64_t count = 0;
  std::vector<OverlapWindow> windows;
  std::uint64_t min_ns = ~0ull, max_ns = 0, dur_count = 0;
  double sum_ns = 0.0;

  void label(std::uint64_t t) {
    if (count == 0) first = t;
    last = t;
    if (++count == window) {
      windows.push_back({worker, first, last, count});
      count = 0;
    }
  }
  void duration(std::uint64_t ns) {
    if (ns == 0) ns = 1;  // clock-granularity floor: iterations take time
    min_ns = std::min(min_ns, ns);
    max_ns = std::max(max_ns, ns);
    sum_ns += static_cast<double>(ns);
    ++dur_count;
  }
  void flush() {
    if (count >= 2) windows.push_back({worker, first, last, count});
  }
};

}  // namespace

AsyncRunResult run_async(const Objective& obj, const AsyncConfig& cfg,
                         std::vector<double> x0) {
  if (cfg.workers == 0)
    throw std::invalid_argument("need at least one worker");
  if (cfg.gamma < 0.0)
    throw std::invalid_argument("step size must be nonnegative");
  if (cfg.read_all_then_sample && cfg.algorithm != AsyncAlgo::ASAGA)
    throw std::invalid_argument(
        "read-all-then-sample validation mode applies to the memory-table "
        "algorithm only");

  const std::size_t n = obj.n();
  const std::size_t d = obj.d();
  const std::size_t p = cfg.workers;
  const std::size_t m = cfg.m != 0 ? cfg.m : 2 * n;
  const std::size_t period = cfg.check_period != 0
                                 ? cfg.check_period
                                 : std::max<std::size_t>(1, n / 10);
  const std::uint64_t total = static_cast<std::uint64_t>(cfg.max_epochs) *
                              static_cast<std::uint64_t>(n);
  // tickets the run can claim: the epoch-slot algorithm issues m per epoch
  const std::uint64_t ticket_cap =
      cfg.algorithm == AsyncAlgo::KROMAGNON
          ? static_cast<std::uint64_t>(cfg.max_epochs) *
                static_cast<std::uint64_t>(m)
          : total;
  if (x0.empty()) {
    x0.assign(d, 0.0);
  } else if (x0.size() != d) {
    throw std::invalid_argument("x0 dimension mismatch");
  }

  const auto& data = obj.data();
  const auto& inv_p = obj.stats().inv_p;
  const double mu = obj.mu();
  const double gamma = cfg.gamma;
  const double n_real = static_cast<double>(n);
  const std::size_t row_cap = data.max_row_nnz();

  SharedState sh(d, n);
  sh.x.fill_from(x0);
  sh.ref_x.assign(d, 0.0);
  sh.ref_grad.assign(d, 0.0);
  sh.ref_scalars.assign(n, 0.0);

  ColumnView columns;
  if (cfg.read_all_then_sample) columns = make_column_view(data);

  AsyncRunResult out;
  out.trace.algorithm = algo_name(cfg.algorithm);
  out.trace.p = p;
  out.trace.seed = cfg.seed;
  if (cfg.log_deltas) out.delta_log.assign(p, {});

  std::atomic<std::uint64_t> refreshes{0};
  std::atomic<bool> hit_target{false};
  std::atomic<std::uint64_t> epoch_slot{0};
  std::atomic<std::uint64_t> next_check{period};
  std::mutex trace_mu;
  std::barrier bar(static_cast<std::ptrdiff_t>(p));
  std::vector<std::vector<double>> partials(p);
  std::vector<double> reduce_acc;  // worker 0 only
  std::vector<OverlapLocal> olocal(p);
  std::vector<std::uint64_t> executed(p, 0);

  const auto start = Clock::now();
  auto wall_ns = [&]() {
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() -
                                                             start)
            .count());
  };
  auto epoch_metric = [&](std::uint64_t tickets) {
    return (static_cast<double>(refreshes.load(std::memory_order_relaxed)) *
                n_real +
            static_cast<double>(tickets)) /
           n_real;
  };

  {
    const auto sub = obj.suboptimality(x0, cfg.fstar);
    out.final_subopt_raw = sub.raw;
    if (cfg.record_trace)
      out.trace.records.push_back({0, wall_ns(), sub.raw, 0.0});
    if (cfg.target_subopt && sub.clamped <= *cfg.target_subopt) {
      out.x = x0;
      out.alpha_scalars = sh.alpha_scalars.snapshot();
      out.abar = sh.abar.snapshot();
      out.converged = true;
      out.trace.converged = true;
      return out;
    }
  }

  // Periodic probe: evaluate an inconsistent snapshot whenever the global
  // ticket passes the next multiple of the period. Any worker may fire it
  // (the claim is an atomic bump of next_check), so probes stay prompt even
  // when one worker is starved by the scheduler; at one worker the claim is
  // uncontended and fires at precisely the serial check points.
  auto record_check = [&]() {
    // over-claimed tickets past the budget never execute; clamp the label
    const std::uint64_t tickets =
        std::min(sh.ticket.load(std::memory_order_relaxed), ticket_cap);
    std::uint64_t nc = next_check.load(std::memory_order_relaxed);
    if (tickets < nc) return;
    std::uint64_t advanced = nc;
    while (advanced <= tickets) advanced += period;
    if (!next_check.compare_exchange_strong(nc, advanced,
                                            std::memory_order_relaxed))
      return;
    const auto xs = sh.x.snapshot();
    const auto sub = obj.suboptimality(xs, cfg.fstar);
    if (cfg.record_trace) {
      const TraceRecord rec{tickets, wall_ns(), sub.raw,
                            epoch_metric(tickets)};
      const std::lock_guard<std::mutex> lk(trace_mu);
      out.trace.records.push_back(rec);
    }
    if (cfg.target_subopt && sub.clamped <= *cfg.target_subopt) {
      hit_target.store(true, std::memory_order_relaxed);
      sh.done.store(true, std::memory_order_relaxed);
    }
  };

  auto start_instrumentation = [&](int w, OverlapLocal& ol) {
    ol.worker = w;
    ol.enabled = cfg.measure_overlap;
    ol.window = std::max<std::size_t>(2, cfg.overlap_window);
    if (cfg.worker_start_hook) cfg.worker_start_hook(w);
  };

  auto asaga_worker = [&](int w) {
    OverlapLocal& ol = olocal[w];
    start_instrumentation(w, ol);
    CounterRng rng(cfg.seed + static_cast<std::uint64_t>(w));
    std::vector<double> xh(row_cap), ab(row_cap);
    std::vector<double> xh_full, scal;
    if (cfg.read_all_then_sample) {
      xh_full.resize(d);
      scal.resize(n);
    }
    auto* dlog = cfg.log_deltas ? &out.delta_log[w] : nullptr;
    std::uint64_t done_count = 0;
    for (;;) {
      if (sh.done.load(std::memory_order_relaxed)) break;
      const std::uint64_t t = sh.ticket.fetch_add(1, std::memory_order_relaxed);
      if (t >= total) break;
      const auto t0 = ol.enabled ? Clock::now() : Clock::time_point{};
      if (cfg.read_all_then_sample) {
        // full snapshot of x, then of every memory scalar, then the draw
        for (std::size_t v = 0; v < d; ++v) xh_full[v] = sh.x.load(v);
        for (std::size_t j = 0; j < n; ++j)
          scal[j] = sh.alpha_scalars.load(j);
        const std::size_t i = rng.next_index(n);
        const auto dir = strict_update_direction(obj, columns, xh_full, scal, i);
        for (const auto& [v, g] : dir) {
          const double dx = -(gamma * g);
          sh.x.add(v, dx, cfg.atomic_mode);
          if (dlog) dlog->push_back({v, dx});
        }
        sh.alpha_scalars.store(i, obj.grad_scalar(i, xh_full));
      } else {
        const std::size_t i = rng.next_index(n);
        const auto row = data.row(i);
        double dot = 0.0;
        for (std::size_t k = 0; k < row.size(); ++k) {
          const std::uint32_t v = row.indices[k];
          xh[k] = sh.x.load(v);
          ab[k] = sh.abar.load(v);
          dot += xh[k] * row.values[k];
        }
        const double a_i = sh.alpha_scalars.load(i);
        const double s = loss_scalar(data.labels[i], dot);
        const double ds = s - a_i;
        for (std::size_t k = 0; k < row.size(); ++k) {
          const std::uint32_t v = row.indices[k];
          const double dalpha = ds * row.values[k];
          const double dx =
              saga_xdelta(gamma, dalpha, ab[k], xh[k], inv_p[v], mu);
          sh.x.add(v, dx, cfg.atomic_mode);
          sh.abar.add(v, dalpha / n_real, cfg.atomic_mode);
          if (dlog) dlog->push_back({v, dx});
        }
        sh.alpha_scalars.add(i, ds, cfg.atomic_mode);
      }
      ++done_count;
      if (ol.enabled) {
        ol.label(t);
        ol.duration(static_cast<std::uint64_t>(
            std::chrono::duration_cast<std::chrono::nanoseconds>(
                Clock::now() - t0)
                .count()));
      }
      record_check();
    }
    executed[w] = done_count;
    ol.flush();
  };

  auto hogwild_worker = [&](int w) {
    OverlapLocal& ol = olocal[w];
    start_instrumentation(w, ol);
    CounterRng rng(cfg.seed + static_cast<std::uint64_t>(w));
    std::vector<double> xh(row_cap);
    auto* dlog = cfg.log_deltas ? &out.delta_log[w] : nullptr;
    std::uint64_t done_count = 0;
    for (;;) {
      if (sh.done.load(std::memory_order_relaxed)) break;
      const std::uint64_t t = sh.ticket.fetch_add(1, std::memory_order_relaxed);
      if (t >= total) break;
      const auto t0 = ol.enabled ? Clock::now() : Clock::time_point{};
      const std::size_t i = rng.next_index(n);
      const auto row = data.row(i);
      double dot = 0.0;
      for (std::size_t k = 0; k < row.size(); ++k) {
        xh[k] = sh.x.load(row.indices[k]);
        dot += xh[k] * row.values[k];
      }
      const double s = loss_scalar(data.labels[i], dot);
      for (std::size_t k = 0; k < row.size(); ++k) {
        const std::uint32_t v = row.indices[k];
        const double dx =
            sgd_xdelta(gamma, s * row.values[k], xh[k], inv_p[v], mu);
        sh.x.add(v, dx, cfg.atomic_mode);
        if (dlog) dlog->push_back({v, dx});
      }
      ++done_count;
      if (ol.enabled) {
        ol.label(t);
        ol.duration(static_cast<std::uint64_t>(
            std::chrono::duration_cast<std::chrono::nanoseconds>(
                Clock::now() - t0)
                .count()));
      }
      record_check();
    }
    executed[w] = done_count;
    ol.flush();
  };

  // One synchronous reference rebuild, shared by the epoch algorithms:
  // worker 0 snapshots x, everyone accumulates a disjoint row range, worker
  // 0 reduces the partials in worker order and finalizes. Three barrier
  // stages; bit-identical to the serial refresh at one worker.
  auto rebuild_reference = [&](int w, std::size_t lo, std::size_t hi) {
    if (w == 0) {
      for (std::size_t v = 0; v < d; ++v) sh.ref_x[v] = sh.x.load(v);
    }
    bar.arrive_and_wait();
    partials[w].assign(d, 0.0);
    obj.accumulate_rows(sh.ref_x, lo, hi, partials[w],
                        sh.ref_scalars.data());
    bar.arrive_and_wait();
    if (w == 0) {
      reduce_acc = partials[0];
      for (std::size_t wk = 1; wk < p; ++wk)
        for (std::size_t v = 0; v < d; ++v) reduce_acc[v] += partials[wk][v];
      obj.finalize_gradient(reduce_acc, sh.ref_x, sh.ref_grad);
      refreshes.fetch_add(1, std::memory_order_relaxed);
    }
  };

  auto svrg_inner_update = [&](std::size_t i, std::vector<double>& xh,
                               std::vector<std::pair<std::uint32_t, double>>*
                                   dlog) {
    const auto row = data.row(i);
    double dot = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) {
      xh[k] = sh.x.load(row.indices[k]);
      dot += xh[k] * row.values[k];
    }
    const double s = loss_scalar(data.labels[i], dot);
    const double ds = s - sh.ref_scalars[i];
    for (std::size_t k = 0; k < row.size(); ++k) {
      const std::uint32_t v = row.indices[k];
      const double dx =
          svrg_xdelta(gamma, ds * row.values[k], sh.ref_grad[v], xh[k],
                      sh.ref_x[v], inv_p[v], mu);
      sh.x.add(v, dx, cfg.atomic_mode);
      if (dlog) dlog->push_back({v, dx});
    }
  };

  auto kromagnon_worker = [&](int w) {
    OverlapLocal& ol = olocal[w];
    start_instrumentation(w, ol);
    CounterRng rng(cfg.seed + static_cast<std::uint64_t>(w));
    std::vector<double> xh(row_cap);
    auto* dlog = cfg.log_deltas ? &out.delta_log[w] : nullptr;
    const std::size_t lo = n * static_cast<std::size_t>(w) / p;
    const std::size_t hi = n * (static_cast<std::size_t>(w) + 1) / p;
    std::uint64_t done_count = 0;
    for (std::size_t e = 0; e < cfg.max_epochs; ++e) {
      rebuild_reference(w, lo, hi);
      if (w == 0) epoch_slot.store(0, std::memory_order_relaxed);
      bar.arrive_and_wait();
      for (;;) {
        if (sh.done.load(std::memory_order_relaxed)) break;
        const std::uint64_t slot =
            epoch_slot.fetch_add(1, std::memory_order_relaxed);
        if (slot >= m) break;
        const std::uint64_t t =
            sh.ticket.fetch_add(1, std::memory_order_relaxed);
        const auto t0 = ol.enabled ? Clock::now() : Clock::time_point{};
        const std::size_t i = rng.next_index(n);
        svrg_inner_update(i, xh, dlog);
        ++done_count;
        if (ol.enabled) {
          ol.label(t);
          ol.duration(static_cast<std::uint64_t>(
              std::chrono::duration_cast<std::chrono::nanoseconds>(
                  Clock::now() - t0)
                  .count()));
        }
        record_check();
      }
      bar.arrive_and_wait();
      if (sh.done.load(std::memory_order_relaxed)) break;
    }
    executed[w] = done_count;
    ol.flush();
  };

  auto ahsvrg_worker = [&](int w) {
    OverlapLocal& ol = olocal[w];
    start_instrumentation(w, ol);
    CounterRng rng(cfg.seed + static_cast<std::uint64_t>(w));
    std::vector<double> xh(row_cap);
    auto* dlog = cfg.log_deltas ? &out.delta_log[w] : nullptr;
    const std::size_t lo = n * static_cast<std::size_t>(w) / p;
    const std::size_t hi = n * (static_cast<std::size_t>(w) + 1) / p;
    std::uint64_t done_count = 0;
    bool batch_phase = true;
    for (;;) {
      if (batch_phase) {
        bar.arrive_and_wait();
        if (sh.done.load(std::memory_order_relaxed)) break;
        rebuild_reference(w, lo, hi);
        if (w == 0) sh.s.store(0, std::memory_order_relaxed);
        bar.arrive_and_wait();
        batch_phase = false;
        continue;
      }
      if (sh.s.load(std::memory_order_relaxed) == 1) {
        batch_phase = true;
        continue;
      }
      const std::uint64_t t = sh.ticket.fetch_add(1, std::memory_order_relaxed);
      if (t >= total) {
        sh.done.store(true, std::memory_order_relaxed);
        sh.s.store(1, std::memory_order_relaxed);
        batch_phase = true;
        continue;
      }
      const auto t0 = ol.enabled ? Clock::now() : Clock::time_point{};
      if (rng.next_bernoulli(1.0 / n_real)) {
        // epoch-boundary draw: request a synchronous rebuild; no index used
        sh.s.store(1, std::memory_order_relaxed);
        ++done_count;
        if (ol.enabled) ol.label(t);
        record_check();
        batch_phase = true;
        continue;
      }
      const std::size_t i = rng.next_index(n);
      svrg_inner_update(i, xh, dlog);
      ++done_count;
      if (ol.enabled) {
        ol.label(t);
        ol.duration(static_cast<std::uint64_t>(
            std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() -
                                                                 t0)
                .count()));
      }
      record_check();
      if (sh.done.load(std::memory_order_relaxed)) {
        sh.s.store(1, std::memory_order_relaxed);
        batch_phase = true;
      }
    }
    executed[w] = done_count;
    ol.flush();
  };

  std::vector<std::thread> threads;
  threads.reserve(p);
  for (std::size_t w = 0; w < p; ++w) {
    threads.emplace_back([&, w]() {
      const int id = static_cast<int>(w);
      switch (cfg.algorithm) {
        case AsyncAlgo::ASAGA: asaga_worker(id); break;
        case AsyncAlgo::KROMAGNON: kromagnon_worker(id); break;
        case AsyncAlgo::AHSVRG: ahsvrg_worker(id); break;
        case AsyncAlgo::HOGWILD: hogwild_worker(id); break;
      }
    });
  }
  for (auto& th : threads) th.join();

  out.x = sh.x.snapshot();
  out.alpha_scalars = sh.alpha_scalars.snapshot();
  out.abar = sh.abar.snapshot();
  std::uint64_t iters = 0;
  for (std::uint64_t e : executed) iters += e;
  out.iterations = iters;
  const auto sub = obj.suboptimality(out.x, cfg.fstar);
  out.final_subopt_raw = sub.raw;
  out.converged = hit_target.load() ||
                  (cfg.target_subopt && sub.clamped <= *cfg.target_subopt);
  out.trace.converged = out.converged;
  if (cfg.record_trace) {
    // concurrent probes may land out of claim order
    std::stable_sort(out.trace.records.begin(), out.trace.records.end(),
                     [](const TraceRecord& a, const TraceRecord& b) {
                       return a.ticket < b.ticket;
                     });
    if (!out.trace.records.empty() && out.trace.records.back().ticket == iters)
      out.trace.records.pop_back();
    out.trace.records.push_back(
        {iters, wall_ns(), sub.raw, epoch_metric(iters)});
  }
  if (cfg.measure_overlap) {
    out.overlap.p = p;
    std::uint64_t min_ns = ~0ull, max_ns = 0, cnt = 0;
    double sum_ns = 0.0;
    for (auto& ol : olocal) {
      for (auto& wdw : ol.windows) out.overlap.windows.push_back(wdw);
      if (ol.dur_count > 0) {
        min_ns = std::min(min_ns, ol.min_ns);
        max_ns = std::max(max_ns, ol.max_ns);
        sum_ns += ol.sum_ns;
        cnt += ol.dur_count;
      }
    }
    if (cnt > 0) {
      out.overlap.min_iter_ns = min_ns;
      out.overlap.max_iter_ns = max_ns;
      out.overlap.mean_iter_ns = sum_ns / static_cast<double>(cnt);
    }
  }
  return out;
}

}  // namespace asaga
