#pragma once

#include <cmath>

namespace asaga {

// sigma(z) = 1/(1+e^{-z}) without overflow on either tail.
inline double sigmoid(double z) {
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + e^z) without overflow.
inline double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

// Logistic loss of one sample at margin dot = a_i'x with label b in {-1,+1}:
// value log(1+e^{-b dot}); the gradient is loss_scalar(b, dot) * a_i.
inline double loss_value(double b, double dot) { return softplus(-b * dot); }
inline double loss_scalar(double b, double dot) {
  return -b * sigmoid(-b * dot);
}

// Per-coordinate step deltas, shared verbatim by the serial solvers and the
// concurrent workers so that a single-worker concurrent run reproduces the
// serial trajectory bit for bit. inv_p_v is the support reweight 1/p_v;
// passing the literal 1.0 recovers the unweighted (dense) rule exactly,
// since multiplying by 1.0 is exact.

// SAGA coordinate in the sampled support: dalpha = (s_new - s_old) * a_v.
inline double saga_xdelta(double gamma, double dalpha, double abar_v,
                          double x_v, double inv_p_v, double mu) {
  return -(gamma * (dalpha + inv_p_v * abar_v + mu * inv_p_v * x_v));
}

// Dense-rule SAGA coordinate outside the sampled support, and the lagged
// variant's catch-up replay of one postponed step: both see a frozen average
// gradient, so the update is the same affine decay.
inline double saga_decay_xdelta(double gamma, double abar_v, double x_v,
                                double mu) {
  return -(gamma * (abar_v + mu * x_v));
}

// SVRG-style coordinate against reference (x0, g): ds_av = (s - s0) * a_v,
// g_v the batch gradient at x0 (regularizer included).
inline double svrg_xdelta(double gamma, double ds_av, double g_v, double x_v,
                          double x0_v, double inv_p_v, double mu) {
  return -(gamma * (ds_av + mu * inv_p_v * (x_v - x0_v) + inv_p_v * g_v));
}

// Plain stochastic-gradient coordinate: s_av = s * a_v.
inline double sgd_xdelta(double gamma, double s_av, double x_v, double inv_p_v,
                         double mu) {
  return -(gamma * (s_av + mu * inv_p_v * x_v));
}

}  // namespace asaga
