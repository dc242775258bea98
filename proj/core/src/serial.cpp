#include "asaga/serial.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace asaga {

std::string algo_name(SerialAlgo a) {
  switch (a) {
    case SerialAlgo::SGD: return "sgd";
    case SerialAlgo::SAGA_DENSE: return "saga_dense";
    case SerialAlgo::SAGA_SPARSE: return "saga";
    case SerialAlgo::SAGA_LAGGED: return "saga_lagged";
    case SerialAlgo::SVRG: return "svrg";
    case SerialAlgo::SVRG_HOFMANN: return "svrg_hofmann";
  }
  return "unknown";
}

namespace {

bool saga_family(SerialAlgo a) {
  return a == SerialAlgo::SAGA_DENSE || a == SerialAlgo::SAGA_SPARSE ||
         a == SerialAlgo::SAGA_LAGGED;
}

bool svrg_family(SerialAlgo a) {
  return a == SerialAlgo::SVRG || a == SerialAlgo::SVRG_HOFMANN;
}

}  // namespace

SerialState make_serial_state(const Objective& obj, const SolverConfig& cfg,
                              std::vector<double> x0) {
  if (cfg.gamma < 0.0)
    throw std::invalid_argument("step size must be nonnegative");
  SerialState st;
  if (x0.empty()) {
    st.x.assign(obj.d(), 0.0);
  } else {
    if (x0.size() != obj.d())
      throw std::invalid_argument("x0 dimension mismatch");
    st.x = std::move(x0);
  }
  if (saga_family(cfg.algorithm)) {
    st.alpha = GradMemory(obj.n());
    st.abar.assign(obj.d(), 0.0);
  }
  if (svrg_family(cfg.algorithm)) {
    st.ref_x.assign(obj.d(), 0.0);
    st.ref_grad.assign(obj.d(), 0.0);
    st.ref_scalars.assign(obj.n(), 0.0);
  }
  if (cfg.algorithm == SerialAlgo::SAGA_LAGGED)
    st.lag_counters.assign(obj.d(), 0);
  st.rng = CounterRng(cfg.seed);
  return st;
}

void sgd_step(const Objective& obj, const SolverConfig& cfg,
              SerialState& state, std::size_t i) {
  const auto& ds = obj.data();
  const auto& inv_p = obj.stats().inv_p;
  const double s = obj.grad_scalar(i, state.x);
  const auto row = ds.row(i);
  for (std::size_t k = 0; k < row.indices.size(); ++k) {
    const std::uint32_t v = row.indices[k];
    state.x[v] += sgd_xdelta(cfg.gamma, s * row.values[k], state.x[v],
                             inv_p[v], obj.mu());
  }
  ++state.t;
  ++state.grad_evals;
}

void saga_dense_step(const Objective& obj, const SolverConfig& cfg,
                     SerialState& state, std::size_t i) {
  const auto& ds = obj.data();
  const double n = static_cast<double>(obj.n());
  const double s = obj.grad_scalar(i, state.x);
  const double dscalar = s - state.alpha.scalars[i];
  const auto row = ds.row(i);
  std::size_t k = 0;
  for (std::size_t v = 0; v < obj.d(); ++v) {
    if (k < row.indices.size() && row.indices[k] == v) {
      const double dalpha = dscalar * row.values[k];
      state.x[v] += saga_xdelta(cfg.gamma, dalpha, state.abar[v], state.x[v],
                                1.0, obj.mu());
      state.abar[v] += dalpha / n;
      ++k;
    } else {
      state.x[v] +=
          saga_decay_xdelta(cfg.gamma, state.abar[v], state.x[v], obj.mu());
    }
  }
  state.alpha.scalars[i] += dscalar;
  ++state.t;
  ++state.grad_evals;
}

void sparse_saga_step(const Objective& obj, const SolverConfig& cfg,
                      SerialState& state, std::size_t i) {
  const auto& ds = obj.data();
  const auto& inv_p = obj.stats().inv_p;
  const double n = static_cast<double>(obj.n());
  const double s = obj.grad_scalar(i, state.x);
  const double dscalar = s - state.alpha.scalars[i];
  const auto row = ds.row(i);
  for (std::size_t k = 0; k < row.indices.size(); ++k) {
    const std::uint32_t v = row.indices[k];
    const double dalpha = dscalar * row.values[k];
    state.x[v] += saga_xdelta(cfg.gamma, dalpha, state.abar[v], state.x[v],
                              inv_p[v], obj.mu());
    state.abar[v] += dalpha / n;
  }
  state.alpha.scalars[i] += dscalar;
  ++state.t;
  ++state.grad_evals;
}

namespace {

// Replays every decay-only update coordinate v missed since it was last
// current, leaving it as the dense rule would have it before iteration t.
inline void catch_up(double gamma, double mu, double abar_v, double& x_v,
                     std::uint64_t missing) {
  for (std::uint64_t r = 0; r < missing; ++r)
    x_v += saga_decay_xdelta(gamma, abar_v, x_v, mu);
}

}  // namespace

void saga_lagged_step(const Objective& obj, const SolverConfig& cfg,
                      SerialState& state, std::size_t i) {
  const auto& ds = obj.data();
  const double n = static_cast<double>(obj.n());
  const auto row = ds.row(i);
  for (std::size_t k = 0; k < row.indices.size(); ++k) {
    const std::uint32_t v = row.indices[k];
    catch_up(cfg.gamma, obj.mu(), state.abar[v], state.x[v],
             state.t - state.lag_counters[v]);
    state.lag_counters[v] = state.t;
  }
  const double s = obj.grad_scalar(i, state.x);
  const double dscalar = s - state.alpha.scalars[i];
  for (std::size_t k = 0; k < row.indices.size(); ++k) {
    const std::uint32_t v = row.indices[k];
    const double dalpha = dscalar * row.values[k];
    state.x[v] += saga_xdelta(cfg.gamma, dalpha, state.abar[v], state.x[v],
                              1.0, obj.mu());
    state.abar[v] += dalpha / n;
    state.lag_counters[v] = state.t + 1;
  }
  state.alpha.scalars[i] += dscalar;
  ++state.t;
  ++state.grad_evals;
}

void saga_lagged_finalize(const Objective& obj, const SolverConfig& cfg,
                          SerialState& state) {
  for (std::size_t v = 0; v < obj.d(); ++v) {
    catch_up(cfg.gamma, obj.mu(), state.abar[v], state.x[v],
             state.t - state.lag_counters[v]);
    state.lag_counters[v] = state.t;
  }
}

void svrg_refresh(const Objective& obj, SerialState& state) {
  state.ref_x = state.x;
  std::vector<double> acc(obj.d(), 0.0);
  obj.accumulate_rows(state.ref_x, 0, obj.n(), acc,
                      state.ref_scalars.data());
  obj.finalize_gradient(acc, state.ref_x, state.ref_grad);
  state.grad_evals += obj.n();
}

void svrg_step(const Objective& obj, const SolverConfig& cfg,
               SerialState& state, std::size_t i) {
  const auto& ds = obj.data();
  const auto& inv_p = obj.stats().inv_p;
  const double s = obj.grad_scalar(i, state.x);
  const double dscalar = s - state.ref_scalars[i];
  const auto row = ds.row(i);
  for (std::size_t k = 0; k < row.indices.size(); ++k) {
    const std::uint32_t v = row.indices[k];
    state.x[v] +=
        svrg_xdelta(cfg.gamma, dscalar * row.values[k], state.ref_grad[v],
                    state.x[v], state.ref_x[v], inv_p[v], obj.mu());
  }
  ++state.t;
  ++state.grad_evals;
}

void hofmann_iteration(const Objective& obj, const SolverConfig& cfg,
                       SerialState& state) {
  const bool refresh =
      state.rng.next_bernoulli(1.0 / static_cast<double>(obj.n()));
  if (refresh) {
    svrg_refresh(obj, state);
    ++state.t;  // a refresh consumes the iteration slot; no index drawn
    return;
  }
  const std::size_t i = state.rng.next_index(obj.n());
  svrg_step(obj, cfg, state, i);
}

SerialRunResult run_serial(const Objective& obj, const SolverConfig& cfg,
                           std::vector<double> x0) {
  const std::size_t n = obj.n();
  const std::size_t m = cfg.m != 0 ? cfg.m : 2 * n;
  const std::size_t period =
      cfg.check_period != 0 ? cfg.check_period : std::max<std::size_t>(1, n / 10);
  if (svrg_family(cfg.algorithm) && m == 0)
    throw std::invalid_argument("epoch size must be >= 1");

  SerialRunResult out;
  out.state = make_serial_state(obj, cfg, std::move(x0));
  SerialState& st = out.state;
  out.trace.algorithm = algo_name(cfg.algorithm);
  out.trace.p = 1;
  out.trace.seed = cfg.seed;

  const auto start = std::chrono::steady_clock::now();
  std::vector<double> scratch;  // lagged-run evaluations use a caught-up copy

  auto sample = [&](const std::vector<double>& x) {
    const auto sub = obj.suboptimality(x, cfg.fstar);
    out.final_subopt_raw = sub.raw;
    if (cfg.record_trace) {
      TraceRecord r;
      r.ticket = st.t;
      r.wall_ns = static_cast<std::uint64_t>(
          std::chrono::duration_cast<std::chrono::nanoseconds>(
              std::chrono::steady_clock::now() - start)
              .count());
      r.subopt = sub.raw;
      r.epoch = static_cast<double>(st.grad_evals) / static_cast<double>(n);
      out.trace.records.push_back(r);
    }
    if (cfg.target_subopt && sub.clamped <= *cfg.target_subopt)
      out.converged = true;
  };
  auto current_x = [&]() -> const std::vector<double>& {
    if (cfg.algorithm != SerialAlgo::SAGA_LAGGED) return st.x;
    scratch = st.x;
    for (std::size_t v = 0; v < obj.d(); ++v)
      catch_up(cfg.gamma, obj.mu(), st.abar[v], scratch[v],
               st.t - st.lag_counters[v]);
    return scratch;
  };

  sample(st.x);  // the starting point, ticket 0
  if (out.converged) {
    out.trace.converged = true;
    return out;
  }

  const std::uint64_t total =
      static_cast<std::uint64_t>(cfg.max_epochs) * static_cast<std::uint64_t>(n);
  switch (cfg.algorithm) {
    case SerialAlgo::SGD:
    case SerialAlgo::SAGA_DENSE:
    case SerialAlgo::SAGA_SPARSE:
    case SerialAlgo::SAGA_LAGGED: {
      while (st.t < total && !out.converged) {
        const std::size_t i = st.rng.next_index(n);
        switch (cfg.algorithm) {
          case SerialAlgo::SGD: sgd_step(obj, cfg, st, i); break;
          case SerialAlgo::SAGA_DENSE: saga_dense_step(obj, cfg, st, i); break;
          case SerialAlgo::SAGA_SPARSE: sparse_saga_step(obj, cfg, st, i); break;
          default: saga_lagged_step(obj, cfg, st, i); break;
        }
        if (st.t % period == 0) sample(current_x());
      }
      if (cfg.algorithm == SerialAlgo::SAGA_LAGGED)
        saga_lagged_finalize(obj, cfg, st);
      break;
    }
    case SerialAlgo::SVRG: {
      std::vector<double> picked;
      for (std::size_t e = 0; e < cfg.max_epochs && !out.converged; ++e) {
        svrg_refresh(obj, st);
        std::size_t pick = 0;
        bool have_pick = false;
        if (cfg.svrg_random_iterate) {
          pick = st.rng.next_index(m);
          if (pick == 0) {
            picked = st.x;
            have_pick = true;
          }
        }
        for (std::size_t j = 1; j <= m && !out.converged; ++j) {
          const std::size_t i = st.rng.next_index(n);
          svrg_step(obj, cfg, st, i);
          if (cfg.svrg_random_iterate && j == pick) {
            picked = st.x;
            have_pick = true;
          }
          if (st.t % period == 0) sample(st.x);
        }
        if (!out.converged && have_pick) st.x = picked;
      }
      break;
    }
    case SerialAlgo::SVRG_HOFMANN: {
      svrg_refresh(obj, st);
      while (st.t < total && !out.converged) {
        hofmann_iteration(obj, cfg, st);
        if (st.t % period == 0) sample(st.x);
      }
      break;
    }
  }

  // close the trace at the final iterate (replacing a same-ticket sample:
  // the lagged finalize and the SVRG epoch restart can move x after it)
  if (cfg.record_trace && !out.trace.records.empty() &&
      out.trace.records.back().ticket == st.t) {
    out.trace.records.pop_back();
  }
  const bool was_converged = out.converged;
  sample(st.x);
  out.converged = was_converged || out.converged;
  out.trace.converged = out.converged;
  return out;
}

ReferenceSolution reference_solve(const Objective& obj, double tol,
                                  std::size_t max_epochs) {
  SolverConfig cfg;
  cfg.algorithm = SerialAlgo::SAGA_SPARSE;
  cfg.gamma = 1.0 / (3.0 * obj.L());
  cfg.seed = 0x9e3779b9ull;
  SerialState st = make_serial_state(obj, cfg);
  ReferenceSolution sol;
  const std::size_t n = obj.n();
  for (std::size_t e = 0; e < max_epochs; ++e) {
    for (std::size_t k = 0; k < n; ++k)
      sparse_saga_step(obj, cfg, st, st.rng.next_index(n));
    const auto g = obj.full_gradient(st.x);
    double norm_sq = 0.0;
    for (double gv : g) norm_sq += gv * gv;
    sol.grad_norm = std::sqrt(norm_sq);
    sol.epochs_used = e + 1;
    if (sol.grad_norm <= tol) break;
  }
  sol.x_star = st.x;
  sol.fstar = obj.value(sol.x_star);
  return sol;
}

}  // namespace asaga
