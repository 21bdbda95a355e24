#include "gpricing/evaluation/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "gpricing/errors.hpp"

namespace gpricing::evaluation {

namespace {

void check(std::span<const double> y, std::span<const double> y_hat, const char* what) {
  if (y.empty() || y.size() != y_hat.size()) {
    throw ValidationError(std::string(what) + ": need equal, nonempty label and prediction sets");
  }
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Rows of each bucket, overall first.
std::vector<std::pair<std::string, std::vector<std::size_t>>> groups(
    std::span<const PricingSample> rows) {
  std::vector<std::pair<std::string, std::vector<std::size_t>>> out;
  out.emplace_back("overall", std::vector<std::size_t>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out[0].second[i] = i;
  }
  for (const auto m : kMoneynessClasses) {
    for (const auto t : kOptionTypes) {
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].moneyness == m && rows[i].contract.type == t) {
          idx.push_back(i);
        }
      }
      out.emplace_back(bucket_name({m, t}), std::move(idx));
    }
  }
  return out;
}

void gather(std::span<const PricingSample> rows, std::span<const double> pred,
            const std::vector<std::size_t>& idx, std::vector<double>& y, std::vector<double>& p) {
  y.clear();
  p.clear();
  for (const auto i : idx) {
    y.push_back(rows[i].contract.settlement);
    p.push_back(pred[i]);
  }
}

}  // namespace

MetricsReport metrics(std::span<const double> y, std::span<const double> y_hat) {
  check(y, y_hat, "metrics");
  MetricsReport r;
  r.bucket = "overall";
  r.n = y.size();
  const double n = static_cast<double>(y.size());
  double abs_sum = 0.0, sq_sum = 0.0, ape_sum = 0.0, mean = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = y[i] - y_hat[i];
    abs_sum += std::abs(d);
    sq_sum += d * d;
    ape_sum += std::abs(d) / std::abs(y[i]);
    mean += y[i];
  }
  mean /= n;
  double ss_tot = 0.0;
  for (const double v : y) {
    ss_tot += (v - mean) * (v - mean);
  }
  r.mae = abs_sum / n;
  r.rmse = std::sqrt(sq_sum / n);
  r.mape = 100.0 * ape_sum / n;
  if (ss_tot > 0.0) {
    r.r2 = 1.0 - sq_sum / ss_tot;
  }
  return r;
}

std::vector<double> extreme_error_shares(std::span<const double> y, std::span<const double> y_hat,
                                         std::span<const double> thresholds) {
  check(y, y_hat, "extreme_error_shares");
  std::vector<double> out(thresholds.size(), 0.0);
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double ape = 100.0 * std::abs(y[i] - y_hat[i]) / std::abs(y[i]);
    for (std::size_t k = 0; k < thresholds.size(); ++k) {
      if (ape > thresholds[k]) {
        out[k] += 1.0;
      }
    }
  }
  for (double& s : out) {
    s /= static_cast<double>(y.size());
  }
  return out;
}

std::vector<MetricsReport> report_by_bucket(std::span<const PricingSample> rows,
                                            std::span<const double> predictions) {
  if (rows.size() != predictions.size()) {
    throw ValidationError("report_by_bucket: one prediction per row required");
  }
  std::vector<MetricsReport> out;
  std::vector<double> y, p;
  for (const auto& [name, idx] : groups(rows)) {
    MetricsReport r;
    if (!idx.empty()) {
      gather(rows, predictions, idx, y, p);
      r = metrics(y, p);
    }
    r.bucket = name;
    r.n = idx.size();
    out.push_back(std::move(r));
  }
  return out;
}

void write_report_csv(std::ostream& os, std::span<const MetricsReport> reports) {
  os << "bucket,n,mae,rmse,mape,r2\n";
  for (const auto& r : reports) {
    os << r.bucket << ',' << r.n << ',';
    if (r.n > 0) {
      os << num(r.mae) << ',' << num(r.rmse) << ',' << num(r.mape) << ',';
    } else {
      os << ",,,";
    }
    if (r.r2) {
      os << num(*r.r2);
    }
    os << '\n';
  }
}

void write_extreme_csv(std::ostream& os, std::span<const PricingSample> rows,
                       std::span<const double> predictions) {
  if (rows.size() != predictions.size()) {
    throw ValidationError("write_extreme_csv: one prediction per row required");
  }
  os << "bucket,threshold_pct,share\n";
  std::vector<double> y, p;
  for (const auto& [name, idx] : groups(rows)) {
    if (idx.empty()) {
      continue;
    }
    gather(rows, predictions, idx, y, p);
    const auto shares = extreme_error_shares(y, p);
    for (std::size_t k = 0; k < shares.size(); ++k) {
      os << name << ',' << num(kExtremeThresholds[k]) << ',' << num(shares[k]) << '\n';
    }
  }
}

void write_predictions_csv(std::ostream& os, std::span<const PricingSample> rows,
                           std::span<const double> predictions) {
  if (rows.size() != predictions.size()) {
    throw ValidationError("write_predictions_csv: one prediction per row required");
  }
  os << "date,type,strike,underlying,tau_days,settlement,moneyness,prediction,ape_pct\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& c = rows[i].contract;
    const double ape = 100.0 * std::abs(c.settlement - predictions[i]) / std::abs(c.settlement);
    os << c.date.str() << ',' << (c.type == OptionType::call ? 'C' : 'P') << ',' << num(c.strike)
       << ',' << num(c.underlying) << ',' << c.tau_days << ',' << num(c.settlement) << ','
       << to_string(rows[i].moneyness) << ',' << num(predictions[i]) << ',' << num(ape) << '\n';
  }
}

}  // namespace gpricing::evaluation
