#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "gpricing/errors.hpp"
#include "gpricing/log.hpp"
#include "gpricing/market/bsm.hpp"
#include "gpricing/market/bsm_sweep.hpp"
#include "gpricing/market/realized_vol.hpp"
#include "gpricing/market/vol_trajectory.hpp"

namespace gpricing::market {

RealizedVol realized_vol(std::span<const double> log_returns) {
  if (log_returns.empty()) {
    throw ValidationError("realized_vol: empty return series");
  }
  double rv = 0.0;
  for (const double r : log_returns) {
    if (!std::isfinite(r)) {
      throw ValidationError("realized_vol: non-finite return");
    }
    rv += r * r;
  }
  return {rv, std::sqrt(rv) * std::sqrt(kTradingDaysPerYear)};
}

VolTrajectory VolTrajectory::constant(double sigma, std::size_t days) {
  return {std::vector<double>(days, sigma)};
}

void VolTrajectory::validate() const {
  if (daily_sigma.empty()) {
    throw ValidationError("VolTrajectory: needs at least one day");
  }
  for (const double s : daily_sigma) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw ValidationError("VolTrajectory: volatility must be finite and >= 0");
    }
  }
}

std::size_t aligned_day_index(std::size_t step, std::size_t days, std::size_t steps) {
  return std::min(step * days / steps, days - 1);
}

std::vector<double> align_sigma(const VolTrajectory& traj, std::size_t steps) {
  traj.validate();
  if (steps == 0) {
    throw ValidationError("align_sigma: steps must be >= 1");
  }
  std::vector<double> out(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    out[i] = traj.daily_sigma[aligned_day_index(i, traj.days(), steps)];
  }
  return out;
}

std::vector<double> default_sigma_grid() { return {0.10, 0.15, 0.20, 0.25, 0.30}; }

SweepTable bsm_sweep(std::span<const OptionContract> quotes, std::span<const double> sigma_grid,
                     double r) {
  if (sigma_grid.empty()) {
    throw ValidationError("bsm_sweep: empty sigma grid");
  }
  SweepTable table;
  table.sigma_grid.assign(sigma_grid.begin(), sigma_grid.end());
  if (quotes.empty()) {
    return table;
  }

  struct Acc {
    std::size_t n = 0;
    std::vector<double> abs_err;
  };
  std::map<std::string, Acc> by_month;
  Date first = quotes.front().date;
  Date last = first;
  for (const auto& q : quotes) {
    first = std::min(first, q.date);
    last = std::max(last, q.date);
    auto& acc = by_month[q.date.month_key()];
    acc.abs_err.resize(sigma_grid.size(), 0.0);
    ++acc.n;
    const double tau = tau_years(q.tau_days);
    for (std::size_t s = 0; s < sigma_grid.size(); ++s) {
      acc.abs_err[s] +=
          std::abs(bsm_price(q.underlying, q.strike, tau, sigma_grid[s], r, q.type) - q.settlement);
    }
  }

  // Walk calendar months so that holes in the data are reported.
  const std::chrono::year_month_day ymd_first{first.days()};
  const std::chrono::year_month_day ymd_last{last.days()};
  auto ym = ymd_first.year() / ymd_first.month();
  const auto ym_end = ymd_last.year() / ymd_last.month();
  while (ym <= ym_end) {
    const std::string key = Date(std::chrono::sys_days(ym / std::chrono::day{1})).month_key();
    auto it = by_month.find(key);
    if (it == by_month.end()) {
      const std::string msg = "bsm_sweep: month " + key + " has no quotes; omitted";
      log::warn(msg);
      table.warnings.push_back(msg);
    } else {
      MonthSweep m;
      m.month = key;
      m.samples = it->second.n;
      for (const double e : it->second.abs_err) {
        m.mae.push_back(e / static_cast<double>(m.samples));
      }
      m.argmin = static_cast<std::size_t>(
          std::distance(m.mae.begin(), std::min_element(m.mae.begin(), m.mae.end())));
      table.months.push_back(std::move(m));
    }
    ym += std::chrono::months{1};
  }
  return table;
}

}  // namespace gpricing::market
