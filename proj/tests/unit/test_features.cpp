#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <vector>

#include "gpricing/errors.hpp"
#include "gpricing/features/dataset.hpp"
#include "gpricing/features/sentiment.hpp"
#include "gpricing/market/bsm.hpp"
#include "gpricing/market/rng.hpp"

using namespace gpricing;
using namespace gpricing::features;

namespace {

// Closed-form weighted sum, independent of the recursive implementation.
double ewm_oracle(const std::vector<double>& x, double h, std::size_t t) {
  const double a = 1.0 - std::pow(2.0, -1.0 / h);
  double m = std::pow(1.0 - a, static_cast<double>(t)) * x[0];
  for (std::size_t k = 1; k <= t; ++k) {
    m += a * std::pow(1.0 - a, static_cast<double>(t - k)) * x[k];
  }
  return m;
}

std::vector<GubaDaily> random_history(int days, std::uint64_t seed, Date start = {2023, 1, 1}) {
  market::CounterRng rng(seed, 0);
  std::vector<GubaDaily> h;
  for (int i = 0; i < days; ++i) {
    GubaDaily d;
    d.date = start.plus_days(i);
    d.posts_count = 50 + static_cast<double>(rng.below(200));
    d.n_bull = static_cast<double>(rng.below(static_cast<std::uint64_t>(d.posts_count / 2)));
    d.n_bear = static_cast<double>(rng.below(static_cast<std::uint64_t>(d.posts_count / 2)));
    d.views_sum = 1000 + static_cast<double>(rng.below(50000));
    d.comments_sum = static_cast<double>(rng.below(500));
    h.push_back(d);
  }
  return h;
}

GubaDaily day(Date date, double bull, double bear, double posts, double views = 100,
              double comments = 10) {
  return {date, bull, bear, posts, views, comments};
}

}  // namespace

TEST(FeaturesMoneyness, WorkedExamples) {
  EXPECT_EQ(classify_moneyness(4000, 4000, OptionType::call), Moneyness::atm);
  EXPECT_EQ(classify_moneyness(4000, 4000, OptionType::put), Moneyness::atm);
  EXPECT_EQ(classify_moneyness(4200, 4000, OptionType::call), Moneyness::itm);
  EXPECT_EQ(classify_moneyness(4200, 4000, OptionType::put), Moneyness::otm);
  EXPECT_EQ(classify_moneyness(3800, 4000, OptionType::call), Moneyness::otm);
  EXPECT_EQ(classify_moneyness(3800, 4000, OptionType::put), Moneyness::itm);
  EXPECT_EQ(classify_moneyness(103, 100, OptionType::call), Moneyness::atm);
  EXPECT_EQ(classify_moneyness(97, 100, OptionType::put), Moneyness::atm);
  EXPECT_THROW(classify_moneyness(0, 100, OptionType::call), ValidationError);
}

TEST(FeaturesEwm, WorkedExamples) {
  EXPECT_EQ(ewm_alpha(1.0), 0.5);
  const std::vector<double> c(12, 3.25);
  for (const double v : ewm(c, 5.0)) EXPECT_EQ(v, 3.25);
  for (const double v : ewm_std(c, 5.0)) EXPECT_EQ(v, 0.0);
  const std::vector<double> s{0.0, 1.0};
  EXPECT_EQ(ewm(s, 1.0), (std::vector<double>{0.0, 0.5}));
  EXPECT_THROW(ewm({}, 3.0), ValidationError);
  EXPECT_THROW(ewm_alpha(0.0), ValidationError);
}

TEST(FeaturesEwm, MatchesClosedFormSums) {
  market::CounterRng rng(2, 0);
  std::vector<double> x(40);
  for (double& v : x) v = rng.normal();
  for (const double h : {1.0, 3.0, 30.0}) {
    const auto m = ewm(x, h);
    const auto sd = ewm_std(x, h);
    const double a = ewm_alpha(h);
    double var = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
      EXPECT_NEAR(m[t], ewm_oracle(x, h, t), 1e-12);
      const double d = x[t] - ewm_oracle(x, h, t);
      var = t == 0 ? 0.0 : a * d * d + (1 - a) * var;
      EXPECT_NEAR(sd[t], std::sqrt(var), 1e-12);
    }
  }
}

TEST(FeaturesSentiment, WorkedExamples) {
  const auto d = day({2023, 1, 1}, 10, 4, 20);
  EXPECT_NEAR(net_sent(d), 0.3, 1e-9);
  const auto even = day({2023, 1, 1}, 7, 7, 20);
  EXPECT_NEAR(entropy(even), std::log(2.0), 1e-12);
  EXPECT_EQ(entropy(day({2023, 1, 1}, 0, 0, 20)), 0.0);
  EXPECT_NEAR(entropy(day({2023, 1, 1}, 5, 0, 20)), 0.0, 1e-7);
  EXPECT_NEAR(activity(day({2023, 1, 1}, 0, 0, 1, 2, 3)),
              std::log(2.0) + std::log(3.0) + std::log(4.0), 1e-14);
  EXPECT_THROW(day({2023, 1, 1}, 15, 10, 20).validate(), DataError);
}

TEST(FeaturesSentiment, ConstantHistoryGivesZeros) {
  std::vector<GubaDaily> h;
  for (int i = 0; i < 60; ++i) h.push_back(day(Date(2023, 1, 1).plus_days(i), 12, 5, 30));
  const SentimentHistory hist(h);
  const Date q = Date(2023, 1, 1).plus_days(59);
  const auto atm = hist.features(q, Moneyness::atm);
  EXPECT_NEAR(atm.e[0], 7.0 / 30.0, 1e-9);
  EXPECT_EQ(atm.e[1], 0.0);
  EXPECT_EQ(atm.e[2], 0.0);
  EXPECT_EQ(atm.e[3], 0.0);
  const auto otm = hist.features(q, Moneyness::otm);
  EXPECT_EQ(otm.e[0], 0.0);
  EXPECT_EQ(otm.e[1], 0.0);
  EXPECT_EQ(otm.e[2], 0.0);
  EXPECT_EQ(otm.e[3], 0.0);
  EXPECT_FALSE(otm.burn_in);
  const auto itm = hist.features(q, Moneyness::itm);
  for (const double v : itm.e) EXPECT_EQ(v, 0.0);
}

TEST(FeaturesSentiment, MatchesDirectFormulas) {
  const auto h = random_history(80, 3);
  const SentimentHistory hist(h);
  std::vector<double> ns, act;
  for (const auto& d : h) {
    ns.push_back((d.n_bull - d.n_bear) / (d.posts_count + 1e-8));
    act.push_back(std::log1p(d.posts_count) + std::log1p(d.views_sum) + std::log1p(d.comments_sum));
  }
  const std::size_t t = 70;
  const auto atm = hist.features(h[t].date, Moneyness::atm);
  EXPECT_NEAR(atm.e[0], ns[t], 1e-14);
  EXPECT_NEAR(atm.e[1], ns[t] - ewm_oracle(ns, 3.0, t), 1e-12);
  const double p = h[t].n_bull / (h[t].n_bull + h[t].n_bear + 1e-8);
  EXPECT_NEAR(atm.e[4], -(p * std::log(p) + (1 - p) * std::log(1 - p)), 1e-7);
  const auto otm = hist.features(h[t].date, Moneyness::otm);
  EXPECT_NEAR(otm.e[0], ns[t] - ewm_oracle(ns, 5.0, t), 1e-12);
  EXPECT_NEAR(otm.e[4], ewm_oracle(ns, 5.0, t), 1e-12);
  EXPECT_TRUE(otm.e[2] == 0.0 || otm.e[2] == 1.0);
  EXPECT_TRUE(otm.e[3] == 0.0 || otm.e[3] == 1.0);
}

TEST(FeaturesSentiment, RangesHold) {
  const auto h = random_history(120, 4);
  const SentimentHistory hist(h);
  for (const auto& d : h) {
    const auto atm = hist.features(d.date, Moneyness::atm);
    EXPECT_GE(atm.e[0], -1.0);
    EXPECT_LE(atm.e[0], 1.0);
    EXPECT_GE(atm.e[4], 0.0);
    EXPECT_LE(atm.e[4], std::log(2.0) + 1e-15);
    const auto otm = hist.features(d.date, Moneyness::otm);
    EXPECT_TRUE(otm.e[2] == 0.0 || otm.e[2] == 1.0);
    EXPECT_TRUE(otm.e[3] == 0.0 || otm.e[3] == 1.0);
  }
}

TEST(FeaturesSentiment, ExtremeDayRaisesFlagsAfterBurnIn) {
  std::vector<GubaDaily> h;
  market::CounterRng rng(5, 0);
  for (int i = 0; i < 60; ++i) {
    h.push_back(day(Date(2023, 1, 1).plus_days(i), 10 + static_cast<double>(rng.below(3)), 10,
                    40, 1000, 50));
  }
  h.back() = day(h.back().date, 40, 0, 400, 1e6, 1e4);
  const SentimentHistory hist(h);
  const auto f = hist.features(h.back().date, Moneyness::otm);
  EXPECT_EQ(f.e[2], 1.0);
  EXPECT_EQ(f.e[3], 1.0);
  // The same spike inside the burn-in window is suppressed.
  std::vector<GubaDaily> early(h.begin(), h.begin() + 10);
  early.back() = day(early.back().date, 40, 0, 400, 1e6, 1e4);
  const auto g = SentimentHistory(early).features(early.back().date, Moneyness::otm);
  EXPECT_TRUE(g.burn_in);
  EXPECT_EQ(g.e[2], 0.0);
  EXPECT_EQ(g.e[3], 0.0);
}

TEST(FeaturesSentiment, NoLookAhead) {
  auto h = random_history(90, 6);
  const Date q = h[50].date;
  const auto before_atm = SentimentHistory(h).features(q, Moneyness::atm);
  const auto before_otm = SentimentHistory(h).features(q, Moneyness::otm);
  for (std::size_t i = 51; i < h.size(); ++i) {
    h[i] = day(h[i].date, 500, 0, 1000, 1e9, 1e7);
  }
  h.push_back(day(h.back().date.plus_days(1), 0, 900, 1000));
  EXPECT_EQ(SentimentHistory(h).features(q, Moneyness::atm).e, before_atm.e);
  EXPECT_EQ(SentimentHistory(h).features(q, Moneyness::otm).e, before_otm.e);
}

TEST(FeaturesSentiment, GapsCarryForward) {
  std::vector<GubaDaily> h = random_history(40, 7);
  h.erase(h.begin() + 20, h.begin() + 25);
  const SentimentHistory hist(h);
  EXPECT_EQ(hist.features(Date(2023, 1, 1).plus_days(22), Moneyness::atm).e,
            hist.features(h[19].date, Moneyness::atm).e);
  EXPECT_THROW(hist.features(Date(2022, 12, 31), Moneyness::atm), DataError);
  auto dup = h;
  dup.push_back(dup.front());
  EXPECT_THROW(SentimentHistory{dup}, DataError);
}

TEST(FeaturesSentiment, ManifestListsEveryClass) {
  std::ostringstream os;
  write_feature_manifest(os);
  const std::string s = os.str();
  EXPECT_EQ(s.rfind("class,index,name\n", 0), 0u);
  EXPECT_NE(s.find("ATM,0,NetSent"), std::string::npos);
  EXPECT_NE(s.find("OTM,2,Extreme_flag"), std::string::npos);
  EXPECT_EQ(feature_names(Moneyness::atm)[4], "Entropy");
}

TEST(FeaturesCsv, OptionsCleaningAndRoundTrip) {
  std::istringstream in(
      "date,type,strike,underlying,tau_days,settlement\n"
      "2023-01-03,C,4000,4010.5,20,120.25\n"
      "2023-01-03,P,4000,4010.5,0,1.5\n"
      "2023-01-03,P,3500,4010.5,20,0.1\n"
      "2023-01-04,P,4100,3990,19,150\n");
  CleaningStats st;
  const auto rows = read_options_csv(in, &st);
  EXPECT_EQ(st.read, 4u);
  EXPECT_EQ(st.expired, 1u);
  EXPECT_EQ(st.below_min, 1u);
  EXPECT_EQ(st.kept, 2u);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1].type, OptionType::put);
  for (const auto& r : rows) {
    EXPECT_GE(r.settlement, kMinSettlement);
    EXPECT_GE(r.tau_days, 1);
  }
  std::stringstream ss;
  write_options_csv(ss, rows);
  const auto back = read_options_csv(ss);
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(back[i].date, rows[i].date);
    EXPECT_EQ(back[i].underlying, rows[i].underlying);
    EXPECT_EQ(back[i].settlement, rows[i].settlement);
  }
}

TEST(FeaturesCsv, MalformedInputNamesTheLine) {
  std::istringstream bad_header("date,type,strike\n");
  EXPECT_THROW(read_options_csv(bad_header), DataError);
  std::istringstream bad_row(
      "date,type,strike,underlying,tau_days,settlement\n2023-01-03,C,abc,4000,20,1\n");
  try {
    read_options_csv(bad_row);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("2"), std::string::npos);
  }
  std::istringstream rv_gap("date,day_index,sigma_daily\n2023-01-03,0,0.2\n2023-01-03,2,0.2\n");
  EXPECT_THROW(read_rv_csv(rv_gap), DataError);
  EXPECT_THROW(read_options_csv(std::filesystem::path("/nonexistent/options.csv")), DataError);
}

TEST(FeaturesCsv, RvAndGubaRoundTrip) {
  RvTable rv{{Date(2023, 1, 3), {0.2, 0.21, 0.19}}, {Date(2023, 1, 4), {0.3}}};
  std::stringstream a;
  write_rv_csv(a, rv);
  EXPECT_EQ(read_rv_csv(a), rv);
  const auto h = random_history(5, 8);
  std::stringstream b;
  write_guba_csv(b, h);
  const auto back = read_guba_csv(b);
  ASSERT_EQ(back.size(), h.size());
  EXPECT_EQ(back[3].views_sum, h[3].views_sum);
}

TEST(FeaturesAssemble, JoinsSigmaMoneynessAndSentiment) {
  const std::vector<OptionContract> q{{Date(2023, 2, 10), OptionType::call, 4000, 4010, 3, 50},
                                      {Date(2023, 2, 10), OptionType::put, 3800, 4010, 5, 2},
                                      {Date(2023, 2, 10), OptionType::call, 3800, 4010, 2, 220}};
  RvTable rv{{Date(2023, 2, 10), {0.2, 0.22, 0.24, 0.26}}};
  const SentimentHistory hist(random_history(60, 9));
  const auto rows = assemble(q, rv, &hist);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].daily_sigma, (std::vector<double>{0.2, 0.22, 0.24}));
  EXPECT_EQ(rows[1].daily_sigma, (std::vector<double>{0.2, 0.22, 0.24, 0.26, 0.26}));
  EXPECT_EQ(rows[0].moneyness, Moneyness::atm);
  EXPECT_EQ(rows[1].moneyness, Moneyness::otm);
  EXPECT_EQ(rows[2].moneyness, Moneyness::itm);
  EXPECT_EQ(rows[0].sentiment.e, hist.features(Date(2023, 2, 10), Moneyness::atm).e);
  for (const double v : rows[2].sentiment.e) EXPECT_EQ(v, 0.0);
  const auto plain = assemble(q, rv, nullptr);
  for (const double v : plain[0].sentiment.e) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(assemble(q, RvTable{}, nullptr), DataError);
}

namespace {

std::vector<PricingSample> rows_on_dates(int dates, int per_date) {
  std::vector<PricingSample> rows;
  for (int d = 0; d < dates; ++d) {
    for (int k = 0; k < per_date; ++k) {
      PricingSample s;
      s.contract.date = Date(2023, 1, 2).plus_days(d);
      s.contract.strike = 4000 + 50 * k;
      rows.push_back(s);
    }
  }
  return rows;
}

}  // namespace

TEST(FeaturesSplit, TenDatesSplitSevenTwoOne) {
  const auto rows = rows_on_dates(10, 3);
  const auto sp = split_dataset(rows, 42);
  EXPECT_EQ(sp.train.size(), 21u);
  EXPECT_EQ(sp.val.size(), 6u);
  EXPECT_EQ(sp.test.size(), 3u);
  EXPECT_EQ(sp.by_date.size(), 10u);
}

TEST(FeaturesSplit, DayLevelAtomicityAndDeterminism) {
  const auto rows = rows_on_dates(57, 4);
  const auto a = split_dataset(rows, 7);
  const auto b = split_dataset(rows, 7);
  EXPECT_EQ(a.by_date, b.by_date);
  auto check = [&](const std::vector<PricingSample>& part, Partition p) {
    for (const auto& s : part) EXPECT_EQ(a.by_date.at(s.contract.date), p);
  };
  check(a.train, Partition::train);
  check(a.val, Partition::val);
  check(a.test, Partition::test);
  EXPECT_EQ(a.train.size() + a.val.size() + a.test.size(), rows.size());
  EXPECT_EQ(a.train.size(), 4u * 40u);
  EXPECT_EQ(a.val.size(), 4u * 11u);
  EXPECT_NE(split_dataset(rows, 8).by_date, a.by_date);
  EXPECT_THROW(split_dataset(rows_on_dates(9, 2), 1), DataError);
}

TEST(FeaturesSimulate, DeterministicCleanAndConsistent) {
  SimulateConfig cfg;
  cfg.contracts = 600;
  cfg.trading_days = 30;
  const auto a = simulate_market(cfg);
  const auto b = simulate_market(cfg);
  ASSERT_FALSE(a.quotes.empty());
  ASSERT_EQ(a.quotes.size(), b.quotes.size());
  std::set<Date> dates;
  for (std::size_t i = 0; i < a.quotes.size(); ++i) {
    const auto& q = a.quotes[i];
    EXPECT_EQ(q.settlement, b.quotes[i].settlement);
    EXPECT_GE(q.settlement, kMinSettlement);
    EXPECT_GE(q.tau_days, cfg.tau_min);
    EXPECT_LE(q.tau_days, cfg.tau_max);
    EXPECT_EQ(std::fmod(q.strike, cfg.strike_step), 0.0);
    EXPECT_NEAR(q.settlement,
                market::bsm_price(q.underlying, q.strike, tau_years(q.tau_days), 0.2, 0.0, q.type),
                1e-9);
    const auto wd = std::chrono::weekday(q.date.days());
    EXPECT_NE(wd, std::chrono::Saturday);
    EXPECT_NE(wd, std::chrono::Sunday);
    dates.insert(q.date);
    EXPECT_TRUE(a.rv.contains(q.date));
  }
  EXPECT_LE(dates.size(), 30u);
  cfg.seed = 2;
  EXPECT_NE(simulate_market(cfg).quotes.back().underlying, a.quotes.back().underlying);
  cfg.contracts = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}
