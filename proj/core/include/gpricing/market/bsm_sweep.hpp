#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gpricing/types.hpp"

namespace gpricing::market {

struct MonthSweep {
  std::string month;        // YYYY-MM
  std::size_t samples = 0;
  std::vector<double> mae;  // one per grid sigma
  std::size_t argmin = 0;   // index into the sigma grid
};

struct SweepTable {
  std::vector<double> sigma_grid;
  std::vector<MonthSweep> months;
  std::vector<std::string> warnings;
};

/// Monthly MAE of constant-sigma BSM prices against settlement labels.
/// Calendar months inside the data range that hold no quotes are omitted
/// and reported as warnings.
SweepTable bsm_sweep(std::span<const OptionContract> quotes, std::span<const double> sigma_grid,
                     double r = 0.0);

/// {0.10, 0.15, 0.20, 0.25, 0.30}
std::vector<double> default_sigma_grid();

}  // namespace gpricing::market
