#include "gpricing/features/sentiment.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "gpricing/errors.hpp"
#include "gpricing/log.hpp"

namespace gpricing::features {

void GubaDaily::validate() const {
  const std::array<double, 5> counts{n_bull, n_bear, posts_count, views_sum, comments_sum};
  for (const double c : counts) {
    if (!std::isfinite(c) || c < 0.0) {
      throw DataError("guba " + date.str() + ": counts must be finite and >= 0");
    }
  }
  if (n_bull + n_bear > posts_count) {
    throw DataError("guba " + date.str() + ": n_bull + n_bear exceeds posts_count");
  }
}

Moneyness classify_moneyness(double spot, double strike, OptionType type) {
  if (!(spot > 0.0) || !(strike > 0.0) || !std::isfinite(spot) || !std::isfinite(strike)) {
    throw ValidationError("classify_moneyness: spot and strike must be positive");
  }
  const double m = spot / strike;
  if (m >= 0.97 && m <= 1.03) {
    return Moneyness::atm;
  }
  const bool above = m > 1.03;
  return (type == OptionType::call) == above ? Moneyness::itm : Moneyness::otm;
}

double ewm_alpha(double half_life) {
  if (!(half_life > 0.0)) {
    throw ValidationError("ewm: half-life must be positive");
  }
  return 1.0 - std::exp2(-1.0 / half_life);
}

std::vector<double> ewm(std::span<const double> series, double half_life) {
  const double a = ewm_alpha(half_life);
  if (series.empty()) {
    throw ValidationError("ewm: empty series");
  }
  std::vector<double> out(series.size());
  out[0] = series[0];
  for (std::size_t t = 1; t < series.size(); ++t) {
    out[t] = a * series[t] + (1.0 - a) * out[t - 1];
  }
  return out;
}

std::vector<double> ewm_std(std::span<const double> series, double half_life) {
  const double a = ewm_alpha(half_life);
  const auto mean = ewm(series, half_life);
  std::vector<double> out(series.size());
  double var = 0.0;
  for (std::size_t t = 0; t < series.size(); ++t) {
    const double d = series[t] - mean[t];
    var = t == 0 ? a * d * d : a * d * d + (1.0 - a) * var;
    out[t] = std::sqrt(var);
  }
  return out;
}

double net_sent(const GubaDaily& d) { return (d.n_bull - d.n_bear) / (d.posts_count + kSentimentEps); }

double bull_share(const GubaDaily& d) {
  return d.n_bull / (d.n_bull + d.n_bear + kSentimentEps);
}

double entropy(const GubaDaily& d) {
  const double p = std::clamp(bull_share(d), 0.0, 1.0);
  auto term = [](double q) { return q > 0.0 ? q * std::log(q) : 0.0; };
  return -(term(p) + term(1.0 - p));
}

double activity(const GubaDaily& d) {
  return std::log1p(d.posts_count) + std::log1p(d.views_sum) + std::log1p(d.comments_sum);
}

std::array<std::string_view, kSentimentDim> feature_names(Moneyness m) {
  switch (m) {
    case Moneyness::atm:
      return {"NetSent", "Surprise3", "Disp3", "zActivity", "Entropy"};
    case Moneyness::otm:
      return {"Surprise5", "Disp5", "Extreme_flag", "VolShock_flag", "EWM5_NetSent"};
    case Moneyness::itm:
      break;
  }
  return {"unused", "unused", "unused", "unused", "unused"};
}

void write_feature_manifest(std::ostream& os) {
  os << "class,index,name\n";
  for (const auto m : kMoneynessClasses) {
    const auto names = feature_names(m);
    for (std::size_t i = 0; i < names.size(); ++i) {
      os << to_string(m) << ',' << i << ',' << names[i] << '\n';
    }
  }
}

SentimentHistory::SentimentHistory(std::vector<GubaDaily> days) : days_(std::move(days)) {
  if (days_.empty()) {
    throw DataError("sentiment history is empty");
  }
  std::sort(days_.begin(), days_.end(),
            [](const GubaDaily& a, const GubaDaily& b) { return a.date < b.date; });
  int missing = 0;
  for (std::size_t i = 0; i < days_.size(); ++i) {
    days_[i].validate();
    if (i > 0) {
      const int gap = days_[i].date.days_since(days_[i - 1].date);
      if (gap == 0) {
        throw DataError("guba: duplicate date " + days_[i].date.str());
      }
      missing += gap - 1;
    }
  }
  if (missing > 0) {
    log::warn("guba: " + std::to_string(missing) +
              " calendar days without records; features carry forward over the gaps");
  }

  const std::size_t n = days_.size();
  std::vector<double> ns(n), act(n);
  for (std::size_t i = 0; i < n; ++i) {
    ns[i] = net_sent(days_[i]);
    act[i] = activity(days_[i]);
  }
  const auto m3 = ewm(ns, 3.0), s3 = ewm_std(ns, 3.0);
  const auto m5 = ewm(ns, 5.0), s5 = ewm_std(ns, 5.0);
  const auto m30 = ewm(ns, 30.0), s30 = ewm_std(ns, 30.0);
  const auto ma = ewm(act, 10.0), sa = ewm_std(act, 10.0);
  rows_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Row& r = rows_[i];
    r.net_sent = ns[i];
    r.surprise3 = ns[i] - m3[i];
    r.disp3 = s3[i];
    r.z_activity = (act[i] - ma[i]) / (sa[i] + kSentimentEps);
    r.entropy = entropy(days_[i]);
    r.surprise5 = ns[i] - m5[i];
    r.disp5 = s5[i];
    r.z30 = (ns[i] - m30[i]) / (s30[i] + kSentimentEps);
    r.ewm5 = m5[i];
  }
}

SentimentVector SentimentHistory::features(const Date& date, Moneyness m) const {
  const auto it = std::upper_bound(days_.begin(), days_.end(), date,
                                   [](const Date& d, const GubaDaily& g) { return d < g.date; });
  if (it == days_.begin()) {
    throw DataError("no sentiment record on or before " + date.str());
  }
  const auto idx = static_cast<std::size_t>(it - days_.begin()) - 1;
  const Row& r = rows_[idx];
  SentimentVector out;
  out.burn_in = date.days_since(days_.front().date) < kBurnInDays;
  switch (m) {
    case Moneyness::atm:
      out.e = {r.net_sent, r.surprise3, r.disp3, r.z_activity, r.entropy};
      break;
    case Moneyness::otm: {
      const double extreme = !out.burn_in && std::abs(r.z30) > 2.0 ? 1.0 : 0.0;
      const double shock = !out.burn_in && r.z_activity > 1.5 ? 1.0 : 0.0;
      out.e = {r.surprise5, r.disp5, extreme, shock, r.ewm5};
      break;
    }
    case Moneyness::itm:
      break;
  }
  return out;
}

SentimentVector sentiment_features(std::span<const GubaDaily> history, const Date& date,
                                   Moneyness m) {
  return SentimentHistory({history.begin(), history.end()}).features(date, m);
}

}  // namespace gpricing::features
