#include "gpricing/features/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <string>

#include "gpricing/errors.hpp"
#include "gpricing/log.hpp"
#include "gpricing/market/bsm.hpp"
#include "gpricing/market/rng.hpp"

namespace gpricing::features {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) {
      break;
    }
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) {
    s.remove_suffix(1);
  }
  while (!s.empty() && s.front() == ' ') {
    s.remove_prefix(1);
  }
  return s;
}

// Line-by-line CSV reader that checks the header and the field count.
class CsvReader {
 public:
  CsvReader(std::istream& is, std::string_view name, std::string_view header)
      : is_(is), name_(name) {
    std::string line;
    if (!std::getline(is_, line) || trim(line) != header) {
      throw DataError(std::string(name_) + ": expected header '" + std::string(header) + "'");
    }
    width_ = split_fields(header).size();
  }

  bool next() {
    while (std::getline(is_, line_)) {
      ++line_no_;
      if (trim(line_).empty()) {
        continue;
      }
      fields_ = split_fields(trim(line_));
      if (fields_.size() != width_) {
        fail("expected " + std::to_string(width_) + " fields");
      }
      return true;
    }
    return false;
  }

  std::string_view field(std::size_t i) const { return trim(fields_[i]); }

  double number(std::size_t i) const {
    const auto f = field(i);
    double v = 0.0;
    const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
    if (res.ec != std::errc() || res.ptr != f.data() + f.size() || !std::isfinite(v)) {
      fail("bad number '" + std::string(f) + "'");
    }
    return v;
  }

  long integer(std::size_t i) const {
    const auto f = field(i);
    long v = 0;
    const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
    if (res.ec != std::errc() || res.ptr != f.data() + f.size()) {
      fail("bad integer '" + std::string(f) + "'");
    }
    return v;
  }

  Date date(std::size_t i) const {
    try {
      return Date::parse(field(i));
    } catch (const DataError& e) {
      fail(e.what());
    }
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw DataError(std::string(name_) + " line " + std::to_string(line_no_ + 1) + ": " + what);
  }

 private:
  std::istream& is_;
  std::string_view name_;
  std::size_t width_ = 0;
  std::string line_;
  std::vector<std::string_view> fields_;
  std::size_t line_no_ = 0;
};

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open " + path.string());
  }
  return in;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool is_weekday(const Date& d) {
  const std::chrono::weekday wd{d.days()};
  return wd != std::chrono::Saturday && wd != std::chrono::Sunday;
}

}  // namespace

std::vector<OptionContract> read_options_csv(std::istream& is, CleaningStats* stats) {
  CsvReader csv(is, "options.csv", "date,type,strike,underlying,tau_days,settlement");
  CleaningStats st;
  std::vector<OptionContract> out;
  while (csv.next()) {
    ++st.read;
    OptionContract c;
    c.date = csv.date(0);
    try {
      c.type = parse_option_type(csv.field(1));
    } catch (const Error& e) {
      csv.fail(e.what());
    }
    c.strike = csv.number(2);
    c.underlying = csv.number(3);
    c.tau_days = static_cast<int>(csv.integer(4));
    c.settlement = csv.number(5);
    if (!(c.strike > 0.0) || !(c.underlying > 0.0)) {
      csv.fail("strike and underlying must be positive");
    }
    if (c.tau_days < 1) {
      ++st.expired;
      continue;
    }
    if (c.settlement < kMinSettlement) {
      ++st.below_min;
      continue;
    }
    out.push_back(c);
  }
  st.kept = out.size();
  if (stats != nullptr) {
    *stats = st;
  }
  return out;
}

std::vector<OptionContract> read_options_csv(const std::filesystem::path& path,
                                             CleaningStats* stats) {
  auto in = open_input(path);
  return read_options_csv(in, stats);
}

RvTable read_rv_csv(std::istream& is) {
  CsvReader csv(is, "rv_forecast.csv", "date,day_index,sigma_daily");
  RvTable rv;
  while (csv.next()) {
    const Date d = csv.date(0);
    const long idx = csv.integer(1);
    const double s = csv.number(2);
    auto& block = rv[d];
    if (idx != static_cast<long>(block.size())) {
      csv.fail("day_index " + std::to_string(idx) + " out of sequence for " + d.str());
    }
    if (s < 0.0) {
      csv.fail("sigma_daily must be >= 0");
    }
    block.push_back(s);
  }
  return rv;
}

RvTable read_rv_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_rv_csv(in);
}

std::vector<GubaDaily> read_guba_csv(std::istream& is) {
  CsvReader csv(is, "guba_daily.csv", "date,n_bull,n_bear,posts_count,views_sum,comments_sum");
  std::vector<GubaDaily> out;
  while (csv.next()) {
    GubaDaily g;
    g.date = csv.date(0);
    g.n_bull = csv.number(1);
    g.n_bear = csv.number(2);
    g.posts_count = csv.number(3);
    g.views_sum = csv.number(4);
    g.comments_sum = csv.number(5);
    try {
      g.validate();
    } catch (const DataError& e) {
      csv.fail(e.what());
    }
    out.push_back(g);
  }
  return out;
}

std::vector<GubaDaily> read_guba_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_guba_csv(in);
}

void write_options_csv(std::ostream& os, std::span<const OptionContract> rows) {
  os << "date,type,strike,underlying,tau_days,settlement\n";
  for (const auto& c : rows) {
    os << c.date.str() << ',' << (c.type == OptionType::call ? 'C' : 'P') << ',' << num(c.strike)
       << ',' << num(c.underlying) << ',' << c.tau_days << ',' << num(c.settlement) << '\n';
  }
}

void write_rv_csv(std::ostream& os, const RvTable& rv) {
  os << "date,day_index,sigma_daily\n";
  for (const auto& [d, block] : rv) {
    for (std::size_t i = 0; i < block.size(); ++i) {
      os << d.str() << ',' << i << ',' << num(block[i]) << '\n';
    }
  }
}

void write_guba_csv(std::ostream& os, std::span<const GubaDaily> rows) {
  os << "date,n_bull,n_bear,posts_count,views_sum,comments_sum\n";
  for (const auto& g : rows) {
    os << g.date.str() << ',' << num(g.n_bull) << ',' << num(g.n_bear) << ','
       << num(g.posts_count) << ',' << num(g.views_sum) << ',' << num(g.comments_sum) << '\n';
  }
}

std::vector<PricingSample> assemble(std::span<const OptionContract> quotes, const RvTable& rv,
                                    const SentimentHistory* sentiment) {
  std::vector<PricingSample> out;
  out.reserve(quotes.size());
  std::size_t padded = 0;
  for (const auto& q : quotes) {
    const auto it = rv.find(q.date);
    if (it == rv.end() || it->second.empty()) {
      throw DataError("no sigma forecast for pricing date " + q.date.str());
    }
    PricingSample s;
    s.contract = q;
    s.moneyness = classify_moneyness(q.underlying, q.strike, q.type);
    const auto& block = it->second;
    const auto D = static_cast<std::size_t>(q.tau_days);
    s.daily_sigma.assign(block.begin(), block.begin() + static_cast<std::ptrdiff_t>(std::min(D, block.size())));
    if (s.daily_sigma.size() < D) {
      ++padded;
      s.daily_sigma.resize(D, block.back());
    }
    if (sentiment != nullptr && s.moneyness != Moneyness::itm) {
      s.sentiment = sentiment->features(q.date, s.moneyness);
    }
    out.push_back(std::move(s));
  }
  if (padded > 0) {
    log::warn(std::to_string(padded) +
              " quotes outlive their sigma forecast; the last forecast value is held");
  }
  return out;
}

Split split_dataset(std::span<const PricingSample> rows, std::uint64_t seed) {
  std::set<Date> distinct;
  for (const auto& r : rows) {
    distinct.insert(r.contract.date);
  }
  if (distinct.size() < 10) {
    throw DataError("split_dataset: need at least 10 distinct dates, have " +
                    std::to_string(distinct.size()));
  }
  std::vector<Date> dates(distinct.begin(), distinct.end());
  market::CounterRng rng(seed, 0);
  for (std::size_t i = dates.size() - 1; i > 0; --i) {
    std::swap(dates[i], dates[rng.below(i + 1)]);
  }
  const auto n = static_cast<double>(dates.size());
  const auto n_train = static_cast<std::size_t>(std::llround(0.7 * n));
  const auto n_val = static_cast<std::size_t>(std::llround(0.2 * n));
  Split split;
  for (std::size_t i = 0; i < dates.size(); ++i) {
    split.by_date[dates[i]] = i < n_train           ? Partition::train
                              : i < n_train + n_val ? Partition::val
                                                    : Partition::test;
  }
  for (const auto& r : rows) {
    switch (split.by_date.at(r.contract.date)) {
      case Partition::train:
        split.train.push_back(r);
        break;
      case Partition::val:
        split.val.push_back(r);
        break;
      case Partition::test:
        split.test.push_back(r);
        break;
    }
  }
  return split;
}

void SimulateConfig::validate() const {
  if (contracts < 1 || trading_days < 1) {
    throw ConfigError("simulate: contracts and trading_days must be positive");
  }
  if (!(sigma_star > 0.0) || !(spot0 > 0.0) || !(strike_step > 0.0) || noise < 0.0) {
    throw ConfigError("simulate: sigma_star, spot0, strike_step must be > 0 and noise >= 0");
  }
  if (!(moneyness_lo > 0.0) || !(moneyness_hi >= moneyness_lo)) {
    throw ConfigError("simulate: need 0 < moneyness_lo <= moneyness_hi");
  }
  if (tau_min < 1 || tau_max < tau_min) {
    throw ConfigError("simulate: need 1 <= tau_min <= tau_max");
  }
}

SyntheticMarket simulate_market(const SimulateConfig& cfg) {
  cfg.validate();
  SyntheticMarket out;
  market::CounterRng spot_rng(market::derive_seed(cfg.seed, 0), 0);
  const double dt = 1.0 / kTradingDaysPerYear;
  double spot = cfg.spot0;
  Date day = cfg.start;
  const std::vector<double> block(static_cast<std::size_t>(cfg.tau_max), cfg.sigma_star);
  for (int d = 0; d < cfg.trading_days; ++d) {
    while (!is_weekday(day)) {
      day = day.plus_days(1);
    }
    if (d > 0) {
      spot *= std::exp((cfg.r - 0.5 * cfg.sigma_star * cfg.sigma_star) * dt +
                       cfg.sigma_star * std::sqrt(dt) * spot_rng.normal());
    }
    out.rv[day] = block;
    // Quotes of day d: an even share of the total, remainder to the first days.
    const int count = cfg.contracts / cfg.trading_days + (d < cfg.contracts % cfg.trading_days ? 1 : 0);
    market::CounterRng rng(market::derive_seed(cfg.seed, 1, static_cast<std::uint64_t>(d)), 0);
    for (int k = 0; k < count; ++k) {
      OptionContract c;
      c.date = day;
      c.type = rng.uniform() < 0.5 ? OptionType::call : OptionType::put;
      const double m = cfg.moneyness_lo + (cfg.moneyness_hi - cfg.moneyness_lo) * rng.uniform();
      c.underlying = spot;
      c.strike = std::max(cfg.strike_step, cfg.strike_step * std::round(spot / m / cfg.strike_step));
      c.tau_days = cfg.tau_min + static_cast<int>(rng.below(
                                     static_cast<std::uint64_t>(cfg.tau_max - cfg.tau_min + 1)));
      const double z = rng.normal();
      double label = market::bsm_price(spot, c.strike, tau_years(c.tau_days), cfg.sigma_star, cfg.r,
                                       c.type);
      if (cfg.noise > 0.0) {
        label *= 1.0 + cfg.noise * z;
      }
      if (label >= kMinSettlement) {
        c.settlement = label;
        out.quotes.push_back(c);
      }
    }
    day = day.plus_days(1);
  }
  return out;
}

}  // namespace gpricing::features
