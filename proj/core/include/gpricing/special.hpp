#pragma once

#include <cmath>
#include <numbers>

// Scalar special functions shared by the autodiff primitives, the
// activation layers and the Black-Scholes pricer.

namespace gpricing::special {

inline constexpr double kInvSqrt2 = 0.70710678118654752440;
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

/// Standard normal CDF through erfc; absolute error below 1e-15.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

inline double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

inline double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/// ln(1 + e^x) without overflow.
inline double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

/// Exact GELU, x * Phi(x).
inline double gelu(double x) { return x * normal_cdf(x); }
inline double gelu_d1(double x) { return normal_cdf(x) + x * normal_pdf(x); }
inline double gelu_d2(double x) { return normal_pdf(x) * (2.0 - x * x); }

inline double silu(double x) { return x * sigmoid(x); }
inline double silu_d1(double x) {
  const double s = sigmoid(x);
  return s * (1.0 + x * (1.0 - s));
}
inline double silu_d2(double x) {
  const double s = sigmoid(x);
  return s * (1.0 - s) * (2.0 + x * (1.0 - 2.0 * s));
}

inline double tanh_d1(double x) {
  const double t = std::tanh(x);
  return 1.0 - t * t;
}
inline double tanh_d2(double x) {
  const double t = std::tanh(x);
  return -2.0 * t * (1.0 - t * t);
}

}  // namespace gpricing::special
