#pragma once

#include <span>

namespace gpricing::market {

struct RealizedVol {
  double variance = 0.0;      // sum of squared intraday log returns
  double sigma_annual = 0.0;  // sqrt(variance) * sqrt(252)
};

/// Throws ValidationError on an empty or non-finite return series.
RealizedVol realized_vol(std::span<const double> log_returns);

}  // namespace gpricing::market
