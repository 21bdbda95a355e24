#pragma once

#include <cmath>

#include "gpricing/autodiff/var.hpp"
#include "gpricing/types.hpp"

namespace gpricing::market {

/// Black-Scholes-Merton price of a European option. Generic over the
/// scalar type so Greeks can be taken on an autodiff tape; the limit
/// branch (sigma * sqrt(tau) -> 0) returns the discounted intrinsic value.
template <class T>
T bsm_price_generic(const T& spot, double strike, double tau, const T& sigma, double r,
                    OptionType type) {
  using ad::normcdf;
  using std::log;
  using std::sqrt;
  const double df = std::exp(-r * tau);
  const double vol_time = ad::primal_value(sigma) * std::sqrt(tau > 0.0 ? tau : 0.0);
  if (!(tau > 0.0) || !(vol_time > 1e-14)) {
    const T fwd_intrinsic = type == OptionType::call ? spot - strike * df : strike * df - spot;
    return ad::primal_value(fwd_intrinsic) > 0.0 ? fwd_intrinsic : fwd_intrinsic * 0.0;
  }
  const T sd = sigma * std::sqrt(tau);
  const T d1 = (log(spot / strike) + r * tau + sigma * sigma * (0.5 * tau)) / sd;
  const T d2 = d1 - sd;
  if (type == OptionType::call) {
    return spot * normcdf(d1) - normcdf(d2) * (strike * df);
  }
  return normcdf(-d2) * (strike * df) - spot * normcdf(-d1);
}

/// Plain-double pricer; r = 0 matches the engine's default configuration.
inline double bsm_price(double spot, double strike, double tau, double sigma, double r,
                        OptionType type) {
  return bsm_price_generic<double>(spot, strike, tau, sigma, r, type);
}

}  // namespace gpricing::market
