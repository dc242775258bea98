#pragma once

#include <cstddef>
#include <string>

namespace asaga::theory {

// Closed-form step sizes, rate factors and speedup conditions. All pure;
// preconditions are enforced with exceptions. The big-O speedup conditions
// are evaluated with unit constants and are advisory only.

// Variance-reduced incremental gradient, serial: step gamma = a/(5L), a <= 1;
// per-iteration geometric rate factor (1/5)min{1/n, a/kappa}.
double saga_rate(std::size_t n, double kappa, double a);

// Asynchronous variant: largest admissible a for gamma = a/L given overlap
// tau. Valid for tau < n/10; out of that regime the bound degrades
// exponentially and we refuse instead of extrapolating.
double asaga_max_a(std::size_t n, std::size_t tau, double delta, double kappa);

struct SpeedupCheck {
  bool ok = false;
  std::string regime;  // "well-conditioned" (n >= kappa) or "ill-conditioned"
};

// tau <= n and tau <= (1/sqrt(delta)) * max{1, n/kappa}, unit constants
SpeedupCheck asaga_speedup_ok(std::size_t n, double kappa, double delta,
                              std::size_t tau);

// Epoch-based rate theta = (1/(mu*gamma*m) + 2L(1+2 sqrt(delta) tau)(gamma +
// tau mu gamma^2)) / (1 - 2ed term); convergent iff 0 < theta < 1. Throws
// when the denominator is not positive.
double svrg_theta(double gamma, std::size_t m, double L, double mu,
                  double delta, std::size_t tau);

struct KromagnonPlan {
  double a_star = 0.0;  // gamma = a/(4L) admissible up to this a
  double m = 0.0;       // epoch length 32 kappa / a
  double rate_per_grad = 0.0;  // (1/4) min{1/n, a/(64 kappa)}
};

KromagnonPlan kromagnon_max_a(std::size_t n, std::size_t tau, double delta,
                              double kappa);

// Constant-step-size stochastic gradient, asynchronous: returns
// min{a*(tau), kappa/tau} for gamma = a/L.
double hogwild_max_a(std::size_t tau, double delta, double kappa);

// Radius of the convergence ball: (8 gamma (C1 + tau C2)/mu +
// 4 gamma^2 C1 tau) sigma^2 with C1 = 1 + sqrt(delta) tau and
// C2 = sqrt(delta) + gamma mu C1. tau = 0 gives 8 gamma sigma^2 / mu.
double hogwild_ball(double gamma, std::size_t tau, double delta, double mu,
                    double sigma_sq);

// Serial baselines: ball 2 gamma sigma^2 / mu at rate a/kappa for a <= 1/2;
// the step size that reaches eps-accuracy is min{1/(2L), eps mu/(2 sigma^2)}.
double sgd_ball(double gamma, double mu, double sigma_sq);
double sgd_gamma_for_accuracy(double L, double mu, double sigma_sq,
                              double eps);

}  // namespace asaga::theory
