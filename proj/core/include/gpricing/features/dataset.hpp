#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "gpricing/features/sentiment.hpp"
#include "gpricing/types.hpp"

namespace gpricing::features {

/// Quotes below this settlement price are dropped during cleaning (CNY).
inline constexpr double kMinSettlement = 0.2;

/// Daily sigma forecast block per pricing date (day_index 0..D-1).
using RvTable = std::map<Date, std::vector<double>>;

struct CleaningStats {
  std::size_t read = 0;
  std::size_t expired = 0;    // tau_days < 1
  std::size_t below_min = 0;  // settlement < kMinSettlement
  std::size_t kept = 0;
};

// CSV readers. Each expects its header row and throws DataError (naming the
// line) on malformed rows or a missing file.

/// options.csv: date,type,strike,underlying,tau_days,settlement. Applies the
/// cleaning rule; `stats` (optional) receives the row counts.
std::vector<OptionContract> read_options_csv(std::istream& is, CleaningStats* stats = nullptr);
std::vector<OptionContract> read_options_csv(const std::filesystem::path& path,
                                             CleaningStats* stats = nullptr);
/// rv_forecast.csv: date,day_index,sigma_daily. Day indices of a date must
/// run 0..D-1 in order.
RvTable read_rv_csv(std::istream& is);
RvTable read_rv_csv(const std::filesystem::path& path);
/// guba_daily.csv: date,n_bull,n_bear,posts_count,views_sum,comments_sum.
std::vector<GubaDaily> read_guba_csv(std::istream& is);
std::vector<GubaDaily> read_guba_csv(const std::filesystem::path& path);

void write_options_csv(std::ostream& os, std::span<const OptionContract> rows);
void write_rv_csv(std::ostream& os, const RvTable& rv);
void write_guba_csv(std::ostream& os, std::span<const GubaDaily> rows);

/// Joins quotes with their sigma trajectory (first tau_days entries of the
/// date's block, padded with its last value when the block is shorter),
/// moneyness class and sentiment vector (zero when `sentiment` is null or the
/// class is ITM). Throws DataError if a quote date has no sigma block.
std::vector<PricingSample> assemble(std::span<const OptionContract> quotes, const RvTable& rv,
                                    const SentimentHistory* sentiment);

enum class Partition { train, val, test };

struct Split {
  std::vector<PricingSample> train, val, test;
  std::map<Date, Partition> by_date;
};

/// Day-level 7:2:1 split: distinct dates are shuffled with the seed and the
/// first round(0.7 n) go to train, the next round(0.2 n) to validation and
/// the rest to test. Throws DataError with fewer than 10 distinct dates.
Split split_dataset(std::span<const PricingSample> rows, std::uint64_t seed);

/// Synthetic market generated from Black-Scholes prices.
struct SimulateConfig {
  int contracts = 5000;
  double sigma_star = 0.20;
  double r = 0.0;
  double noise = 0.0;  // relative std of multiplicative label noise
  double spot0 = 4000.0;
  int trading_days = 120;  // distinct pricing dates, weekdays from start
  Date start{2023, 1, 3};
  double moneyness_lo = 0.90;  // strike drawn so X/K lies in [lo, hi]
  double moneyness_hi = 1.10;
  double strike_step = 50.0;
  int tau_min = 5;  // trading days
  int tau_max = 90;
  std::uint64_t seed = 1;

  /// Throws ConfigError on an empty or inconsistent configuration.
  void validate() const;
};

struct SyntheticMarket {
  std::vector<OptionContract> quotes;
  RvTable rv;  // constant sigma_star blocks of length tau_max
};

/// Draws up to cfg.contracts quotes along a GBM path of the underlying and
/// labels them with bsm_price at sigma_star (times 1 + noise * N(0,1) when
/// noise > 0). Labels below kMinSettlement are discarded, so fewer rows can
/// come back. Deterministic in cfg.
SyntheticMarket simulate_market(const SimulateConfig& cfg);

}  // namespace gpricing::features
