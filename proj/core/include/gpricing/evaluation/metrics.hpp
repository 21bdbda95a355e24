#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gpricing/types.hpp"

namespace gpricing::evaluation {

struct MetricsReport {
  std::string bucket;  // "overall" or e.g. "ATM-call"
  std::size_t n = 0;
  double mae = 0.0;   // CNY
  double rmse = 0.0;  // CNY
  double mape = 0.0;  // percent
  std::optional<double> r2;  // absent when the labels have zero variance
};

/// MAE, RMSE, MAPE (percent, denominator y with no floor) and R^2 = 1 -
/// SS_res / SS_tot. Throws ValidationError on empty or mismatched input.
MetricsReport metrics(std::span<const double> y, std::span<const double> y_hat);

inline constexpr std::array<double, 3> kExtremeThresholds{50.0, 100.0, 200.0};

/// Share of samples whose absolute percentage error strictly exceeds each
/// threshold (percent).
std::vector<double> extreme_error_shares(std::span<const double> y, std::span<const double> y_hat,
                                         std::span<const double> thresholds = kExtremeThresholds);

/// Overall report (direct aggregation over every row) followed by one report
/// per (moneyness, type) bucket in ATM, ITM, OTM / call, put order. Empty
/// buckets are kept with n = 0 and no metrics.
std::vector<MetricsReport> report_by_bucket(std::span<const PricingSample> rows,
                                            std::span<const double> predictions);

// CSV writers; all emit a header row.

/// report.csv: bucket,n,mae,rmse,mape,r2 (empty cells where undefined).
void write_report_csv(std::ostream& os, std::span<const MetricsReport> reports);
/// extreme.csv: bucket,threshold_pct,share.
void write_extreme_csv(std::ostream& os, std::span<const PricingSample> rows,
                       std::span<const double> predictions);
/// predictions.csv: date,type,strike,underlying,tau_days,settlement,moneyness,prediction,ape_pct.
void write_predictions_csv(std::ostream& os, std::span<const PricingSample> rows,
                           std::span<const double> predictions);

}  // namespace gpricing::evaluation
