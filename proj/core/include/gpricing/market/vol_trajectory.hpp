#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gpricing::market {

/// Daily annualised volatility forecast over the remaining trading days.
struct VolTrajectory {
  std::vector<double> daily_sigma;

  std::size_t days() const { return daily_sigma.size(); }

  static VolTrajectory constant(double sigma, std::size_t days);
  /// Throws ValidationError if empty or if any entry is negative or non-finite.
  void validate() const;
};

/// Daily index feeding BSDE step i: min(floor(i * days / steps), days - 1).
std::size_t aligned_day_index(std::size_t step, std::size_t days, std::size_t steps);

/// Piecewise-constant map of the daily trajectory onto `steps` BSDE steps.
std::vector<double> align_sigma(const VolTrajectory& traj, std::size_t steps);

}  // namespace gpricing::market
