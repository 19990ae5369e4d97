#pragma once

// Analytic solutions used as test oracles. Written independently of the
// library's closed forms and fixed-point code.

#include <cmath>

namespace oracle {

inline double malthus(double x0, double rate, double t) { return x0 * std::exp(rate * t); }

// x(t) = beta x0 / (x0 + (beta - x0) e^{-alpha t})
inline double logistic(double x0, double alpha, double beta, double t) {
    return beta * x0 / (x0 + (beta - x0) * std::exp(-alpha * t));
}

// u = ln x satisfies du/dt = -alpha u.
inline double gompertz(double x0, double alpha, double t) {
    return std::exp(std::log(x0) * std::exp(-alpha * t));
}

// Fixed point of x -> gamma * Phi_T(x) for the logistic flow.
inline double logistic_reset_fixed_point(double gamma, double alpha, double beta, double period) {
    const double e = std::exp(-alpha * period);
    return beta * (gamma - e) / (1.0 - e);
}

// In log coordinates the map is u -> ln gamma + e^{-alpha T} u.
inline double gompertz_reset_fixed_point(double gamma, double alpha, double period) {
    return std::exp(std::log(gamma) / (1.0 - std::exp(-alpha * period)));
}

// n-th iterate of the affine log-coordinate map from x0.
inline double gompertz_reset_iterate(double x0, double gamma, double alpha, double period, int n) {
    const double e = std::exp(-alpha * period);
    const double en = std::pow(e, n);
    const double u = std::log(gamma) * (1.0 - en) / (1.0 - e) + en * std::log(x0);
    return std::exp(u);
}

// Logistic stroboscopic map P(x) = gamma * Phi_T(x).
inline double logistic_reset_map(double x, double gamma, double alpha, double beta, double period) {
    return gamma * logistic(x, alpha, beta, period);
}

}  // namespace oracle
