// Command-line front end: train / gridsearch / bias-demo / overlap.
// Exit codes: 0 success, 1 configuration error, 2 data error,
// 3 non-convergence (target missed or every grid point diverged).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "asaga/async.hpp"
#include "asaga/dataset.hpp"
#include "asaga/grid.hpp"
#include "asaga/labeling.hpp"
#include "asaga/metrics.hpp"
#include "asaga/objective.hpp"
#include "asaga/serial.hpp"
#include "asaga/synthetic.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitData = 2;
constexpr int kExitNoConvergence = 3;

struct AlgoRef {
  bool is_async = false;
  asaga::SerialAlgo serial = asaga::SerialAlgo::SAGA_SPARSE;
  asaga::AsyncAlgo async = asaga::AsyncAlgo::ASAGA;
};

std::optional<AlgoRef> parse_algo(const std::string& name) {
  using S = asaga::SerialAlgo;
  using A = asaga::AsyncAlgo;
  if (name == "sgd") return AlgoRef{false, S::SGD, {}};
  if (name == "saga_dense") return AlgoRef{false, S::SAGA_DENSE, {}};
  if (name == "saga") return AlgoRef{false, S::SAGA_SPARSE, {}};
  if (name == "saga_lagged") return AlgoRef{false, S::SAGA_LAGGED, {}};
  if (name == "svrg") return AlgoRef{false, S::SVRG, {}};
  if (name == "svrg_hofmann") return AlgoRef{false, S::SVRG_HOFMANN, {}};
  if (name == "asaga") return AlgoRef{true, {}, A::ASAGA};
  if (name == "kromagnon") return AlgoRef{true, {}, A::KROMAGNON};
  if (name == "ahsvrg") return AlgoRef{true, {}, A::AHSVRG};
  if (name == "hogwild") return AlgoRef{true, {}, A::HOGWILD};
  return std::nullopt;
}

struct DataOptions {
  std::string data_path;
  std::string synthetic_spec;
};

// 0 = ok, otherwise an exit code; the dataset lands in `out`.
int load_data(const DataOptions& opt, asaga::SparseDataset& out) {
  if (opt.data_path.empty() == opt.synthetic_spec.empty()) {
    std::fprintf(stderr,
                 "error: exactly one of --data and --synthetic is required\n");
    return kExitConfig;
  }
  if (!opt.data_path.empty()) {
    try {
      out = asaga::load_libsvm(opt.data_path);
    } catch (const std::exception& e) {
      std::fprintf(stderr, "error: cannot load %s: %s\n",
                   opt.data_path.c_str(), e.what());
      return kExitData;
    }
    return kExitOk;
  }
  try {
    const auto spec = asaga::parse_synthetic_spec(opt.synthetic_spec);
    out = asaga::make_synthetic(spec);
    std::printf("synthetic dataset: %s\n", spec.describe().c_str());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: bad synthetic spec: %s\n", e.what());
    return kExitConfig;
  }
  return kExitOk;
}

std::size_t thread_cap() {
  const char* env = std::getenv("ASAGA_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0' || v == 0) {
    std::fprintf(stderr, "warning: ignoring unparsable ASAGA_THREADS=%s\n",
                 env);
    return 0;
  }
  return static_cast<std::size_t>(v);
}

std::vector<std::size_t> capped_workers(std::vector<std::size_t> ps) {
  const std::size_t cap = thread_cap();
  if (cap == 0) return ps;
  for (auto& p : ps) {
    if (p > cap) {
      std::fprintf(stderr, "note: ASAGA_THREADS=%zu caps p=%zu\n", cap, p);
      p = cap;
    }
  }
  return ps;
}

bool ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    std::fprintf(stderr, "error: cannot create output directory %s: %s\n",
                 dir.c_str(), ec.message().c_str());
    return false;
  }
  return true;
}

double resolve_mu(double mu_flag, std::size_t n) {
  return mu_flag > 0.0 ? mu_flag : 1.0 / static_cast<double>(n);
}

struct RunOutcome {
  asaga::RunTrace trace;
  double final_subopt = 0.0;
  bool converged = false;
  std::uint64_t iterations = 0;
};

RunOutcome run_one(const asaga::Objective& obj, const AlgoRef& algo,
                   double gamma, std::size_t p, std::uint64_t seed,
                   std::size_t epochs, std::size_t m,
                   std::optional<double> target, double fstar,
                   asaga::AtomicMode mode) {
  RunOutcome out;
  if (algo.is_async) {
    asaga::AsyncConfig cfg;
    cfg.algorithm = algo.async;
    cfg.workers = p;
    cfg.gamma = gamma;
    cfg.m = m;
    cfg.seed = seed;
    cfg.max_epochs = epochs;
    cfg.target_subopt = target;
    cfg.fstar = fstar;
    cfg.atomic_mode = mode;
    auto res = asaga::run_async(obj, cfg);
    out.trace = std::move(res.trace);
    out.final_subopt = std::max(res.final_subopt_raw, 0.0);
    out.converged = res.converged;
    out.iterations = res.iterations;
  } else {
    asaga::SolverConfig cfg;
    cfg.algorithm = algo.serial;
    cfg.gamma = gamma;
    cfg.m = m;
    cfg.seed = seed;
    cfg.max_epochs = epochs;
    cfg.target_subopt = target;
    cfg.fstar = fstar;
    auto res = asaga::run_serial(obj, cfg);
    out.trace = std::move(res.trace);
    out.final_subopt = std::max(res.final_subopt_raw, 0.0);
    out.converged = res.converged;
    out.iterations = res.state.t;
  }
  return out;
}

int cmd_train(const DataOptions& data_opt, const std::string& algo_name,
              double gamma, std::vector<std::size_t> ps,
              std::vector<std::uint64_t> seeds, std::size_t epochs,
              std::size_t m, std::optional<double> target, double mu_flag,
              const std::string& out_dir, const std::string& mode_name) {
  const auto algo = parse_algo(algo_name);
  if (!algo) {
    std::fprintf(stderr, "error: unknown algorithm %s\n", algo_name.c_str());
    return kExitConfig;
  }
  if (gamma < 0.0) {
    std::fprintf(stderr, "error: --gamma must be >= 0\n");
    return kExitConfig;
  }
  ps = capped_workers(std::move(ps));
  if (!algo->is_async) {
    for (std::size_t p : ps) {
      if (p != 1) {
        std::fprintf(stderr,
                     "error: %s is a single-worker algorithm; use p=1\n",
                     algo_name.c_str());
        return kExitConfig;
      }
    }
  }
  const asaga::AtomicMode mode = mode_name == "unsafe"
                                     ? asaga::AtomicMode::UNSAFE
                                     : asaga::AtomicMode::CAS;
  asaga::SparseDataset data;
  if (int rc = load_data(data_opt, data); rc != kExitOk) return rc;
  if (!ensure_out_dir(out_dir)) return kExitData;

  const double mu = resolve_mu(mu_flag, data.n);
  asaga::Objective obj(std::move(data), mu);
  std::printf("problem: n=%zu d=%zu mu=%g L=%g kappa=%g delta=%g\n", obj.n(),
              obj.d(), obj.mu(), obj.L(), obj.kappa(), obj.stats().delta);
  const auto ref = asaga::reference_solve(obj);
  std::printf("reference: f*=%.12g grad_norm=%.3g (%zu epochs)\n", ref.fstar,
              ref.grad_norm, ref.epochs_used);

  std::vector<asaga::RunTrace> traces;
  bool all_converged = true;
  for (std::size_t p : ps) {
    for (std::uint64_t seed : seeds) {
      auto res = run_one(obj, *algo, gamma, p, seed, epochs, m, target,
                         ref.fstar, mode);
      const auto path = std::filesystem::path(out_dir) /
                        asaga::trace_filename(algo_name, p, seed);
      asaga::emit_csv(res.trace, path.string());
      std::printf(
          "%s p=%zu seed=%llu final_subopt=%.6g iterations=%llu%s -> %s\n",
          algo_name.c_str(), p, static_cast<unsigned long long>(seed),
          res.final_subopt, static_cast<unsigned long long>(res.iterations),
          res.converged ? " (target reached)" : "", path.c_str());
      if (target && !res.converged) all_converged = false;
      traces.push_back(std::move(res.trace));
    }
  }
  if (target && ps.size() > 1) {
    const auto table = asaga::speedup_table(traces, *target);
    std::printf("speedup to target %.3g:\n", *target);
    for (const auto& row : table) {
      if (!row.reached) {
        std::printf("  p=%zu: target not reached in every run\n", row.p);
        continue;
      }
      std::printf(
          "  p=%zu: iters=%.0f iteration_speedup=%.2f time_speedup=%.2f\n",
          row.p, row.iters_to_target, row.iteration_speedup,
          row.time_speedup);
    }
  }
  if (target && !all_converged) {
    std::fprintf(stderr, "target suboptimality %g not reached\n", *target);
    return kExitNoConvergence;
  }
  return kExitOk;
}

int cmd_gridsearch(const DataOptions& data_opt, const std::string& algo_name,
                   std::vector<double> grid_spec, std::vector<std::size_t> ps,
                   std::vector<std::uint64_t> seeds, std::size_t epochs,
                   std::size_t m, double target, double mu_flag,
                   const std::string& mode_name) {
  const auto algo = parse_algo(algo_name);
  if (!algo) {
    std::fprintf(stderr, "error: unknown algorithm %s\n", algo_name.c_str());
    return kExitConfig;
  }
  ps = capped_workers(std::move(ps));
  if (!algo->is_async) {
    for (std::size_t p : ps) {
      if (p != 1) {
        std::fprintf(stderr,
                     "error: %s is a single-worker algorithm; use p=1\n",
                     algo_name.c_str());
        return kExitConfig;
      }
    }
  }
  const asaga::AtomicMode mode = mode_name == "unsafe"
                                     ? asaga::AtomicMode::UNSAFE
                                     : asaga::AtomicMode::CAS;
  asaga::SparseDataset data;
  if (int rc = load_data(data_opt, data); rc != kExitOk) return rc;
  const double mu = resolve_mu(mu_flag, data.n);
  asaga::Objective obj(std::move(data), mu);

  asaga::GridSpec spec = asaga::default_grid(obj.L());
  if (!grid_spec.empty()) {
    if (grid_spec.size() < 2 || grid_spec.size() > 3) {
      std::fprintf(stderr, "error: --grid wants lo,hi[,count]\n");
      return kExitConfig;
    }
    spec.lo = grid_spec[0];
    spec.hi = grid_spec[1];
    if (grid_spec.size() == 3)
      spec.count = static_cast<std::size_t>(grid_spec[2]);
  }
  std::vector<double> gammas;
  try {
    gammas = asaga::make_grid(spec);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: bad grid: %s\n", e.what());
    return kExitConfig;
  }
  const auto ref = asaga::reference_solve(obj);
  const std::vector<double> zero(obj.d(), 0.0);
  const double initial_subopt =
      obj.suboptimality(zero, ref.fstar).clamped;
  const std::uint64_t seed = seeds.empty() ? 0 : seeds.front();

  bool any_failure = false;
  for (std::size_t p : ps) {
    std::vector<asaga::GridOutcome> outcomes;
    for (double gamma : gammas) {
      asaga::GridOutcome o;
      o.gamma = gamma;
      auto res = run_one(obj, *algo, gamma, p, seed, epochs, m, target,
                         ref.fstar, mode);
      o.final_subopt = res.final_subopt;
      o.diverged = asaga::diverged(res.final_subopt, initial_subopt);
      for (const auto& r : res.trace.records) {
        if (r.subopt <= target) {
          o.reached = true;
          o.iters_to_target = static_cast<double>(r.ticket);
          o.ns_to_target = static_cast<double>(r.wall_ns);
          break;
        }
      }
      std::printf("  p=%zu gamma=%.6g final=%.4g%s%s\n", p, gamma,
                  o.final_subopt, o.reached ? " (reached)" : "",
                  o.diverged ? " (diverged)" : "");
      outcomes.push_back(o);
    }
    const auto sel = asaga::select_best(outcomes);
    if (sel.all_diverged) {
      std::fprintf(stderr,
                   "gridsearch failure: every step size diverged at p=%zu\n",
                   p);
      any_failure = true;
      continue;
    }
    std::printf("best gamma for %s at p=%zu: %.9g\n", algo_name.c_str(), p,
                *sel.best_gamma);
    if (sel.best_at_boundary)
      std::printf("warning: best step size sits on the grid boundary; "
                  "widen the grid\n");
  }
  return any_failure ? kExitNoConvergence : kExitOk;
}

int cmd_bias_demo(std::size_t mc_samples, std::uint64_t seed) {
  asaga::ToyProblem toy;
  toy.dim = 2;
  toy.factors = {{{0, 1}, {1.0, 0.5}}, {{0, 1}, {-1.0, 2.0}}};
  const std::vector<double> x0 = {0.0, 0.0};
  const double gamma = 0.1;
  const double fast = 1.0, slow = 2.0;

  const auto enumeration =
      asaga::enumerate_two_core_first_step(toy, gamma, x0, fast, slow);
  std::printf("write-order labeling, two cores, factor 0 fast / 1 slow:\n");
  std::printf("  branches: %zu\n", enumeration.branch_count);
  const auto g0 = toy.factor_gradient(0, x0);
  const auto g1 = toy.factor_gradient(1, x0);
  std::size_t fast_first = 0;
  for (const auto& bx1 : enumeration.branch_x1) {
    std::printf("    x1 = (%.6g, %.6g)\n", bx1[0], bx1[1]);
    if (bx1[0] == x0[0] - gamma * g0[0] && bx1[1] == x0[1] - gamma * g0[1])
      ++fast_first;
  }
  const double w_fast = static_cast<double>(fast_first) /
                        static_cast<double>(enumeration.branch_count);
  std::printf("  mixture weights: %.6g fast, %.6g slow\n", w_fast,
              1.0 - w_fast);
  std::printf("  E[x1] = (%.6g, %.6g); unbiased would be (%.6g, %.6g)\n",
              enumeration.expected_x1[0], enumeration.expected_x1[1],
              x0[0] - gamma * (0.5 * (g0[0] + g1[0])),
              x0[1] - gamma * (0.5 * (g0[1] + g1[1])));
  std::printf("  P(second slow | first slow) = %.6g\n",
              enumeration.p_second_slow_given_first_slow);

  asaga::ScheduleScript script;
  script.cores = 2;
  script.labeling = asaga::Labeling::AFTER_READ;
  script.horizon = 2;
  script.compute_duration = {fast, slow};
  script.seed = seed;
  const auto updates = asaga::sample_labeled_updates(script, toy, gamma, x0,
                                                     0, mc_samples);
  const auto truth = toy.mean_gradient(x0);
  std::printf("read-order labeling, first labeled update over %zu runs:\n",
              mc_samples);
  bool within = true;
  for (std::size_t v = 0; v < toy.dim; ++v) {
    double mean = 0.0;
    for (const auto& u : updates) mean += u[v];
    mean /= static_cast<double>(updates.size());
    double var = 0.0;
    for (const auto& u : updates) var += (u[v] - mean) * (u[v] - mean);
    var /= static_cast<double>(updates.size());
    const double se =
        std::sqrt(var / static_cast<double>(updates.size()));
    const double dev = std::abs(mean - truth[v]);
    if (se > 0.0 && dev > 3.0 * se) within = false;
    std::printf("  coord %zu: mean=%.6g truth=%.6g |dev|=%.3g se=%.3g\n", v,
                mean, truth[v], dev, se);
  }
  std::printf("  mean within 3 standard errors of the full gradient: %s\n",
              within ? "yes" : "no");
  return kExitOk;
}

int cmd_overlap(const DataOptions& data_opt, const std::string& algo_name,
                double gamma, std::vector<std::size_t> ps,
                std::vector<std::uint64_t> seeds, std::size_t epochs,
                std::size_t window, double mu_flag,
                const std::string& out_dir) {
  const auto algo = parse_algo(algo_name);
  if (!algo || !algo->is_async) {
    std::fprintf(stderr, "error: overlap needs a concurrent algorithm\n");
    return kExitConfig;
  }
  ps = capped_workers(std::move(ps));
  asaga::SparseDataset data;
  if (int rc = load_data(data_opt, data); rc != kExitOk) return rc;
  if (!ensure_out_dir(out_dir)) return kExitData;
  const double mu = resolve_mu(mu_flag, data.n);
  asaga::Objective obj(std::move(data), mu);
  const double g = gamma > 0.0 ? gamma : 1.0 / (5.0 * obj.L());

  std::string csv =
      "p,seed,max_overlap,upper_bound,ratio_max_min,ratio_max_mean\n";
  for (std::size_t p : ps) {
    std::vector<double> maxima;
    for (std::uint64_t seed : seeds) {
      asaga::AsyncConfig cfg;
      cfg.algorithm = algo->async;
      cfg.workers = p;
      cfg.gamma = g;
      cfg.seed = seed;
      cfg.max_epochs = epochs;
      cfg.measure_overlap = true;
      cfg.overlap_window = window;
      cfg.record_trace = false;
      const auto res = asaga::run_async(obj, cfg);
      const auto est = asaga::estimate_overlap(res.overlap);
      maxima.push_back(est.max_observed);
      char line[256];
      std::snprintf(line, sizeof line, "%zu,%llu,%.6g,%.6g,%.6g,%.6g\n", p,
                    static_cast<unsigned long long>(seed), est.max_observed,
                    est.upper_bound, est.duration_ratio_max_min,
                    est.duration_ratio_max_mean);
      csv += line;
    }
    std::sort(maxima.begin(), maxima.end());
    const double median = maxima.empty() ? 0.0 : maxima[maxima.size() / 2];
    std::printf("p=%zu: median max overlap %.3g over %zu runs\n", p, median,
                maxima.size());
  }
  const auto path = std::filesystem::path(out_dir) / "overlap.csv";
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (f == nullptr) {
    std::fprintf(stderr, "error: cannot write %s\n", path.c_str());
    return kExitData;
  }
  std::fwrite(csv.data(), 1, csv.size(), f);
  std::fclose(f);
  std::printf("wrote %s\n", path.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shared-memory stochastic optimization bench"};
  app.require_subcommand(1);

  std::string algo = "saga";
  DataOptions data_opt;
  double gamma = -1.0;
  std::vector<double> grid_spec;
  std::vector<std::size_t> ps = {1};
  std::vector<std::uint64_t> seeds = {0};
  std::size_t epochs = 50;
  std::size_t m = 0;
  double mu_flag = 0.0;
  std::optional<double> target;
  double grid_target = 1e-5;
  std::string out_dir = ".";
  std::string mode_name = "cas";
  std::size_t mc_samples = 100000;
  std::uint64_t demo_seed = 1;
  std::size_t window = 100;

  auto add_common = [&](CLI::App* cmd, bool needs_data) {
    cmd->add_option("--algo", algo, "algorithm name");
    if (needs_data) {
      cmd->add_option("--data", data_opt.data_path,
                      "libsvm file (.gz accepted)");
      cmd->add_option("--synthetic", data_opt.synthetic_spec,
                      "synthetic spec n=..,d=..,nnz=..[,noise=..][,seed=..]");
      cmd->add_option("--mu", mu_flag,
                      "l2 strength (default 1/n)");
    }
    cmd->add_option("--p", ps, "worker counts")->delimiter(',');
    cmd->add_option("--seeds", seeds, "RNG seeds")->delimiter(',');
    cmd->add_option("--epochs", epochs, "pass budget");
    cmd->add_option("--m", m, "inner epoch size (0 = 2n)");
  };

  auto* train = app.add_subcommand("train", "run and emit CSV traces");
  add_common(train, true);
  double target_flag = -1.0;
  train->add_option("--gamma", gamma, "step size")->required();
  train->add_option("--target", target_flag, "stop at this suboptimality");
  train->add_option("--out", out_dir, "output directory");
  train->add_option("--atomic-mode", mode_name, "cas | unsafe");

  auto* grid = app.add_subcommand("gridsearch", "pick the best step size");
  add_common(grid, true);
  grid->add_option("--grid", grid_spec,
                   "lo,hi[,count] (default 1/(10L),10/L,10)")
      ->delimiter(',');
  grid->add_option("--target", grid_target, "time-to-target criterion");
  grid->add_option("--atomic-mode", mode_name, "cas | unsafe");

  auto* bias = app.add_subcommand("bias-demo",
                                  "two-core labeling bias enumeration");
  bias->add_option("--samples", mc_samples, "Monte Carlo runs");
  bias->add_option("--seed", demo_seed, "Monte Carlo seed");

  auto* overlap = app.add_subcommand("overlap", "interleaving measurement");
  add_common(overlap, true);
  overlap->add_option("--gamma", gamma, "step size (default 1/(5L))");
  overlap->add_option("--window", window, "own-iteration window size");
  overlap->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Collapse the library's parse-error codes onto the documented
    // contract: anything wrong with the command line is a config error.
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (train->parsed()) {
      if (target_flag >= 0.0) target = target_flag;
      return cmd_train(data_opt, algo, gamma, ps, seeds, epochs, m, target,
                       mu_flag, out_dir, mode_name);
    }
    if (grid->parsed()) {
      return cmd_gridsearch(data_opt, algo, grid_spec, ps, seeds, epochs, m,
                            grid_target, mu_flag, mode_name);
    }
    if (bias->parsed()) return cmd_bias_demo(mc_samples, demo_seed);
    if (overlap->parsed()) {
      return cmd_overlap(data_opt, algo, gamma, ps, seeds, epochs, window,
                         mu_flag, out_dir);
    }
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  }
  return kExitConfig;
}
