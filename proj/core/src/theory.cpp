#include "asaga/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace asaga::theory {

namespace {

void check_problem(double delta, double kappa) {
  if (!(delta > 0.0) || delta > 1.0)
    throw std::invalid_argument("delta must lie in (0, 1]");
  if (!(kappa >= 1.0)) throw std::invalid_argument("kappa must be >= 1");
}

}  // namespace

double saga_rate(std::size_t n, double kappa, double a) {
  if (!(a > 0.0) || a > 1.0)
    throw std::invalid_argument("rate requires 0 < a <= 1");
  if (n == 0 || !(kappa >= 1.0))
    throw std::invalid_argument("need n >= 1 and kappa >= 1");
  return 0.2 * std::min(1.0 / static_cast<double>(n), a / kappa);
}

double asaga_max_a(std::size_t n, std::size_t tau, double delta,
                   double kappa) {
  check_problem(delta, kappa);
  const auto t = static_cast<double>(tau);
  if (!(t < static_cast<double>(n) / 10.0))
    throw std::domain_error(
        "overlap bound out of regime: requires tau < n/10");
  const double sd = std::sqrt(delta);
  const double xi = std::sqrt(1.0 + (1.0 / (8.0 * kappa)) *
                                        std::min(1.0 / sd, t));
  return 1.0 / (32.0 * (1.0 + t * sd) * xi);
}

SpeedupCheck asaga_speedup_ok(std::size_t n, double kappa, double delta,
                              std::size_t tau) {
  check_problem(delta, kappa);
  const auto t = static_cast<double>(tau);
  const auto nn = static_cast<double>(n);
  SpeedupCheck out;
  const double cap =
      (1.0 / std::sqrt(delta)) * std::max(1.0, nn / kappa);
  out.ok = t <= nn && t <= cap;
  out.regime = nn >= kappa ? "well-conditioned" : "ill-conditioned";
  return out;
}

double svrg_theta(double gamma, std::size_t m, double L, double mu,
                  double delta, std::size_t tau) {
  if (!(gamma > 0.0) || m == 0 || !(L > 0.0) || !(mu > 0.0))
    throw std::invalid_argument("need gamma, L, mu > 0 and m >= 1");
  check_problem(delta, L / mu);
  const auto t = static_cast<double>(tau);
  const double term = 2.0 * L * (1.0 + 2.0 * std::sqrt(delta) * t) *
                      (gamma + t * mu * gamma * gamma);
  const double denom = 1.0 - term;
  if (!(denom > 0.0))
    throw std::domain_error("divergent configuration: epoch-rate denominator"
                            " is not positive");
  return (1.0 / (mu * gamma * static_cast<double>(m)) + term) / denom;
}

KromagnonPlan kromagnon_max_a(std::size_t n, std::size_t tau, double delta,
                              double kappa) {
  check_problem(delta, kappa);
  const auto t = static_cast<double>(tau);
  KromagnonPlan plan;
  plan.a_star = 1.0 / (4.0 * (1.0 + 2.0 * std::sqrt(delta) * t) *
                       (1.0 + t / (16.0 * kappa)));
  plan.m = 32.0 * kappa / plan.a_star;
  plan.rate_per_grad =
      0.25 * std::min(1.0 / static_cast<double>(n),
                      plan.a_star / (64.0 * kappa));
  return plan;
}

double hogwild_max_a(std::size_t tau, double delta, double kappa) {
  check_problem(delta, kappa);
  const auto t = static_cast<double>(tau);
  const double sd = std::sqrt(delta);
  const double xi = std::sqrt(1.0 + (1.0 / (2.0 * kappa)) *
                                        std::min(1.0 / sd, t));
  const double a_star = 1.0 / (5.0 * (1.0 + 2.0 * t * sd) * xi);
  const double cap =
      tau == 0 ? std::numeric_limits<double>::infinity() : kappa / t;
  return std::min(a_star, cap);
}

double hogwild_ball(double gamma, std::size_t tau, double delta, double mu,
                    double sigma_sq) {
  if (!(gamma >= 0.0) || !(mu > 0.0) || sigma_sq < 0.0)
    throw std::invalid_argument("need gamma >= 0, mu > 0, sigma_sq >= 0");
  const auto t = static_cast<double>(tau);
  const double sd = std::sqrt(delta);
  const double c1 = 1.0 + sd * t;
  const double c2 = sd + gamma * mu * c1;
  return (8.0 * gamma * (c1 + t * c2) / mu + 4.0 * gamma * gamma * c1 * t) *
         sigma_sq;
}

double sgd_ball(double gamma, double mu, double sigma_sq) {
  if (!(mu > 0.0)) throw std::invalid_argument("mu must be positive");
  return 2.0 * gamma * sigma_sq / mu;
}

double sgd_gamma_for_accuracy(double L, double mu, double sigma_sq,
                              double eps) {
  if (!(L > 0.0) || !(mu > 0.0) || !(eps > 0.0))
    throw std::invalid_argument("need L, mu, eps > 0");
  if (sigma_sq <= 0.0) return 1.0 / (2.0 * L);  // variance-free problem
  return std::min(1.0 / (2.0 * L), eps * mu / (2.0 * sigma_sq));
}

}  // namespace asaga::theory
