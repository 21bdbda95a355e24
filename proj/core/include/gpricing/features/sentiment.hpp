#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "gpricing/types.hpp"

namespace gpricing::features {

/// Stabiliser in every sentiment denominator.
inline constexpr double kSentimentEps = 1e-8;
/// Calendar days after the first forum record during which the 30-day
/// statistics are not trusted and the event flags are forced to 0.
inline constexpr int kBurnInDays = 30;

/// Classified forum-post aggregates for one calendar day.
struct GubaDaily {
  Date date;
  double n_bull = 0.0;
  double n_bear = 0.0;
  double posts_count = 0.0;
  double views_sum = 0.0;
  double comments_sum = 0.0;

  /// Throws DataError unless counts are >= 0 and n_bull + n_bear <= posts_count.
  void validate() const;
};

/// Moneyness class of a quote from M = X/K: ATM on the closed band
/// [0.97, 1.03]; above it calls are ITM and puts OTM, below it the reverse.
/// Throws ValidationError unless X, K > 0.
Moneyness classify_moneyness(double spot, double strike, OptionType type);

/// Smoothing weight of a half-life h: 1 - 2^(-1/h). Throws ValidationError
/// unless h > 0.
double ewm_alpha(double half_life);

/// Exponentially weighted mean seeded at the first observation. Throws
/// ValidationError on an empty series.
std::vector<double> ewm(std::span<const double> series, double half_life);

/// Square root of var_t = a (x_t - mean_t)^2 + (1 - a) var_{t-1}, var seeded at 0.
std::vector<double> ewm_std(std::span<const double> series, double half_life);

double net_sent(const GubaDaily& d);
double bull_share(const GubaDaily& d);
/// Binary entropy of the bullish share, 0 ln 0 = 0.
double entropy(const GubaDaily& d);
double activity(const GubaDaily& d);

/// Names of the five features of a class, in vector order. ITM has no
/// sentiment channel and reports "unused".
std::array<std::string_view, kSentimentDim> feature_names(Moneyness m);

/// Vector layout per class as CSV: class,index,name.
void write_feature_manifest(std::ostream& os);

/// Causal feature series precomputed over a forum history. Statistics advance
/// once per recorded day; a query on a day without a record reuses the most
/// recent earlier record (carry-forward) and logs the gap.
class SentimentHistory {
 public:
  /// Rows are sorted by date; throws DataError on duplicates, invalid counts
  /// or an empty history.
  explicit SentimentHistory(std::vector<GubaDaily> days);

  const std::vector<GubaDaily>& days() const { return days_; }

  /// Feature vector for quotes on `date` using only records dated <= date.
  /// Throws DataError if no record precedes the date.
  SentimentVector features(const Date& date, Moneyness m) const;

 private:
  struct Row {
    double net_sent, surprise3, disp3, z_activity, entropy;
    double surprise5, disp5, z30, ewm5;
  };
  std::vector<GubaDaily> days_;
  std::vector<Row> rows_;
};

/// One-shot convenience wrapper over SentimentHistory.
SentimentVector sentiment_features(std::span<const GubaDaily> history, const Date& date,
                                   Moneyness m);

}  // namespace gpricing::features
