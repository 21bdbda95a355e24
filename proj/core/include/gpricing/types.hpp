#pragma once

#include <array>
#include <chrono>
#include <compare>
#include <string>
#include <string_view>
#include <vector>

namespace gpricing {

/// Calendar date (proleptic Gregorian), parsed from and printed as YYYY-MM-DD.
class Date {
 public:
  Date() = default;
  explicit Date(std::chrono::sys_days days) : days_(days) {}
  Date(int year, unsigned month, unsigned day);

  /// Throws DataError on malformed input.
  static Date parse(std::string_view text);

  std::string str() const;
  /// "YYYY-MM", used for monthly bucketing.
  std::string month_key() const;

  std::chrono::sys_days days() const { return days_; }
  Date plus_days(int n) const { return Date(days_ + std::chrono::days{n}); }
  /// Calendar days from `other` to this date.
  int days_since(const Date& other) const { return static_cast<int>((days_ - other.days_).count()); }

  auto operator<=>(const Date&) const = default;

 private:
  std::chrono::sys_days days_{};
};

enum class OptionType { call, put };

std::string_view to_string(OptionType t);
/// Accepts C/P as well as call/put (case-insensitive).
OptionType parse_option_type(std::string_view text);

enum class Moneyness { atm, itm, otm };

inline constexpr std::array<Moneyness, 3> kMoneynessClasses{Moneyness::atm, Moneyness::itm,
                                                            Moneyness::otm};
inline constexpr std::array<OptionType, 2> kOptionTypes{OptionType::call, OptionType::put};

std::string_view to_string(Moneyness m);
Moneyness parse_moneyness(std::string_view text);

/// One exchange quote after cleaning.
struct OptionContract {
  Date date;
  OptionType type = OptionType::call;
  double strike = 0.0;      // CNY
  double underlying = 0.0;  // CNY
  int tau_days = 1;         // remaining trading days
  double settlement = 0.0;  // label, CNY
};

/// Trading days per year; also the annualisation factor of realized variance.
inline constexpr double kTradingDaysPerYear = 252.0;

inline double tau_years(int trading_days) { return trading_days / kTradingDaysPerYear; }

/// Terminal payoff of a European option.
inline double payoff(OptionType type, double spot, double strike) {
  const double v = type == OptionType::call ? spot - strike : strike - spot;
  return v > 0.0 ? v : 0.0;
}

/// (moneyness, type) pair used for fine-tuning and reporting.
struct Bucket {
  Moneyness moneyness = Moneyness::atm;
  OptionType type = OptionType::call;

  auto operator<=>(const Bucket&) const = default;
};

/// The five gated sentiment features fed to both networks. Layout depends on
/// the moneyness class (see features::feature_names); ITM uses all zeros.
inline constexpr std::size_t kSentimentDim = 5;

struct SentimentVector {
  std::array<double, kSentimentDim> e{};
  /// Set while the history is too short for the 30-day statistics.
  bool burn_in = false;
};

/// A quote together with everything the networks condition on.
struct PricingSample {
  OptionContract contract;
  Moneyness moneyness = Moneyness::atm;
  std::vector<double> daily_sigma;  // annualised forecast, one entry per remaining trading day
  SentimentVector sentiment;
};

/// e.g. "ATM-call".
std::string bucket_name(const Bucket& b);

}  // namespace gpricing
