#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "gpricing/errors.hpp"
#include "gpricing/features/sentiment.hpp"
#include "gpricing/market/bsm.hpp"
#include "gpricing/market/rng.hpp"
#include "gpricing/trainer/model.hpp"
#include "gpricing/xai/attribution.hpp"

using namespace gpricing;
using namespace gpricing::xai;

namespace {

std::vector<PricingSample> rows(int n, std::uint64_t seed) {
  market::CounterRng rng(seed, 0);
  std::vector<PricingSample> out;
  for (int i = 0; i < n; ++i) {
    PricingSample s;
    const double X = 4000.0 * (0.95 + 0.1 * rng.uniform());
    const double K = 50.0 * std::round(4000.0 * (0.9 + 0.2 * rng.uniform()) / 50.0);
    const int days = 5 + static_cast<int>(rng.below(40));
    const auto type = i % 2 ? OptionType::call : OptionType::put;
    const double sig = 0.15 + 0.1 * rng.uniform();
    const double price = market::bsm_price(X, K, tau_years(days), sig, 0.0, type);
    s.contract = {Date(2023, 2, 1), type, K, X, days, std::max(price, 0.2)};
    s.daily_sigma.assign(static_cast<std::size_t>(days), sig);
    s.moneyness = features::classify_moneyness(X, K, type);
    if (s.moneyness != Moneyness::itm) {
      s.sentiment.e = {rng.normal(), rng.normal(), 0.5, 0.0, 0.4};
    }
    out.push_back(s);
  }
  return out;
}

trainer::PricingModel tiny_model(std::span<const PricingSample> train) {
  trainer::TrainPlan plan;
  for (auto* c : {&plan.pretrain, &plan.finetune}) {
    c->batch_size = 4;
    c->time_steps = 4;
    c->paths = 2;
    c->steps = 5;
    c->warmup = 1;
    c->peak_lr = 1e-2;
  }
  plan.value_shape = nets::NetShape::value_net(4, {8, 6});
  plan.generator_shape = nets::NetShape::generator_net(4, {8, 6});
  return trainer::train_model(plan, train);
}

}  // namespace

TEST(XaiArchAdvantage, WorkedExamples) {
  const auto a = arch_advantage(23.10, 12.0, 12.42);
  EXPECT_NEAR(a.delta_bsm, 10.68, 1e-12);
  EXPECT_NEAR(12.42 + a.delta_bsm, 23.10, 1e-12);
  EXPECT_EQ(arch_advantage(5.0, 6.0, 5.0).delta_bsm, 0.0);
  EXPECT_LT(arch_advantage(5.0, 4.42, 5.0).delta_tb, 0.0);
}

TEST(XaiIntegratedGradients, LinearIsExact) {
  const std::vector<double> w{2.0, -3.0, 0.5};
  const GradFn f = [&](std::span<const double> x, std::span<double> g) {
    double v = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      v += w[i] * x[i];
      g[i] = w[i];
    }
    return v;
  };
  const std::vector<double> x{1.0, 2.0, -1.0}, b{0.5, 0.0, 1.0};
  for (const int m : {1, 3, 10}) {
    const auto r = integrated_gradients(f, x, b, m);
    for (std::size_t i = 0; i < x.size(); ++i) {
      EXPECT_DOUBLE_EQ(r.attributions[i], w[i] * (x[i] - b[i]));
    }
    EXPECT_NEAR(r.completeness_gap, 0.0, 1e-14);
  }
}

TEST(XaiIntegratedGradients, SquareWithinMidpointError) {
  const GradFn f = [](std::span<const double> x, std::span<double> g) {
    g[0] = 2 * x[0];
    return x[0] * x[0];
  };
  const std::vector<double> x{1.0}, b{0.0};
  const auto r = integrated_gradients(f, x, b, 10);
  EXPECT_NEAR(r.attributions[0], 1.0, 1e-3);
  EXPECT_EQ(r.shares, (std::vector<double>{1.0}));
}

TEST(XaiIntegratedGradients, BaselineGivesZero) {
  const GradFn f = [](std::span<const double> x, std::span<double> g) {
    g[0] = std::cos(x[0]);
    g[1] = 1.0;
    return std::sin(x[0]) + x[1];
  };
  const std::vector<double> x{0.3, 0.7};
  const auto r = integrated_gradients(f, x, x, 10);
  EXPECT_EQ(r.attributions, (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(r.shares, (std::vector<double>{0.0, 0.0}));
}

TEST(XaiIntegratedGradients, GroupsAndCompleteness) {
  const GradFn f = [](std::span<const double> x, std::span<double> g) {
    g[0] = std::exp(x[0]) * x[1];
    g[1] = std::exp(x[0]) + 2 * x[2] * x[1];
    g[2] = x[1] * x[1];
    return std::exp(x[0]) * x[1] + x[2] * x[1] * x[1];
  };
  const std::vector<double> x{0.5, 1.2, -0.4}, b{0.0, 0.3, 0.1};
  const std::vector<int> groups{0, 1, 1};
  const auto r = integrated_gradients(f, x, b, 10, groups);
  ASSERT_EQ(r.group_attributions.size(), 2u);
  EXPECT_DOUBLE_EQ(r.group_attributions[1], r.attributions[1] + r.attributions[2]);
  EXPECT_NEAR(r.shares[0] + r.shares[1], 1.0, 1e-15);
  EXPECT_LE(r.completeness_gap, 1e-2 * std::abs(r.f_x - r.f_baseline));
  const auto fine = integrated_gradients(f, x, b, 200, groups);
  EXPECT_LT(fine.completeness_gap, r.completeness_gap);
  EXPECT_THROW(integrated_gradients(f, x, b, 0), ValidationError);
}

TEST(XaiShapley, WorkedExamples) {
  const auto s = shapley_two_player(10, 9, 8, 7);
  EXPECT_DOUBLE_EQ(s.phi_rv, 1.0);
  EXPECT_DOUBLE_EQ(s.phi_sent, 2.0);
  EXPECT_DOUBLE_EQ(s.total_gain, 3.0);
  EXPECT_DOUBLE_EQ(s.share_rv, 1.0 / 3.0);
  const auto z = shapley_two_player(4, 4, 4, 4);
  EXPECT_EQ(z.phi_rv, 0.0);
  EXPECT_EQ(z.phi_sent, 0.0);
  EXPECT_EQ(z.share_rv, 0.0);
  market::CounterRng rng(3, 0);
  for (int i = 0; i < 100; ++i) {
    const double a = 10 * rng.uniform(), b = 10 * rng.uniform(), c = 10 * rng.uniform(),
                 d = 10 * rng.uniform();
    const auto r = shapley_two_player(a, b, c, d);
    EXPECT_NEAR(r.phi_rv + r.phi_sent, a - d, 1e-12);
  }
}

TEST(XaiAblation, ConfigurationsAndIdentities) {
  const auto data = rows(80, 4);
  const auto model = tiny_model(data);
  const auto base = model.price_all(data);
  double mae = 0;
  for (std::size_t i = 0; i < data.size(); ++i) mae += std::abs(base[i] - data[i].contract.settlement);
  mae /= static_cast<double>(data.size());
  EXPECT_EQ(evaluate_ablation(model, data, AblationConfig::full()), mae);

  std::vector<PricingSample> itm;
  for (const auto& s : data) {
    if (s.moneyness == Moneyness::itm) itm.push_back(s);
  }
  ASSERT_FALSE(itm.empty());
  EXPECT_EQ(evaluate_ablation(model, itm, AblationConfig::full()),
            evaluate_ablation(model, itm, AblationConfig::rv_only()));
  EXPECT_EQ(evaluate_ablation(model, itm, AblationConfig::none()),
            evaluate_ablation(model, itm, AblationConfig::sent_only()));

  const auto rep = shapley_ablation(model, data);
  EXPECT_EQ(rep.e_full, mae);
  EXPECT_NEAR(rep.phi.total_gain, rep.e_none - rep.e_full, 1e-12);
  trainer::PriceOptions c;
  c.constant_sigma = kBaselineSigma;
  c.gate_off = true;
  const auto ablated = model.price_all(data, c);
  double e_c = 0;
  for (std::size_t i = 0; i < data.size(); ++i) e_c += std::abs(ablated[i] - data[i].contract.settlement);
  EXPECT_DOUBLE_EQ(rep.e_none, e_c / static_cast<double>(data.size()));
}

TEST(XaiPricingView, GradientsMatchFiniteDifferences) {
  const auto data = rows(60, 5);
  const auto model = tiny_model(data);
  for (std::size_t k = 0; k < 10; ++k) {
    const auto& s = data[k];
    const auto f = pricing_view(model, s);
    const std::vector<double> x{0.23, 0.4};
    std::vector<double> g(2), scratch(2);
    const double v = f(x, g);
    for (std::size_t i = 0; i < 2; ++i) {
      auto up = x, dn = x;
      const double h = 1e-6;
      up[i] += h;
      dn[i] -= h;
      const double fd = (f(up, scratch) - f(dn, scratch)) / (2 * h);
      EXPECT_NEAR(g[i], fd, 1e-5 * std::max(1.0, std::abs(fd))) << k << "," << i;
    }
    (void)v;
    const double gate = model.nets_for({s.moneyness, s.contract.type}).value.gate();
    const std::vector<double> actual{s.daily_sigma[0], gate};
    EXPECT_NEAR(f(actual, scratch), model.price(s), 1e-9 * (1 + std::abs(model.price(s))));
  }
}

TEST(XaiPricingView, AttributePriceIsComplete) {
  const auto data = rows(60, 6);
  const auto model = tiny_model(data);
  std::vector<AttributionResult> res;
  for (std::size_t k = 0; k < 12; ++k) {
    const auto r = attribute_price(model, data[k], 10);
    ASSERT_EQ(r.attributions.size(), 2u);
    EXPECT_LE(r.completeness_gap, 1e-2 * std::abs(r.f_x - r.f_baseline) + 1e-9) << k;
    EXPECT_NEAR(r.f_x, model.price(data[k]), 1e-9 * (1 + std::abs(r.f_x)));
    if (data[k].moneyness == Moneyness::itm) {
      EXPECT_EQ(r.attributions[kGate], 0.0);
    }
    res.push_back(r);
  }
  const auto row = summarize_ig("overall", res);
  EXPECT_NEAR(row.rv_share + row.sent_share, 1.0, 1e-12);
  std::ostringstream os;
  const std::vector<AttributionRow> out{row, AttributionRow{"ATM-call", "shapley", 0.25, 0.75, 1.5, 0}};
  write_attribution_csv(os, out);
  const std::string csv = os.str();
  EXPECT_EQ(csv.rfind("bucket,method,rv_share,sent_share,total_gain,completeness_gap\n", 0), 0u);
  EXPECT_NE(csv.find("\nATM-call,shapley,0.25,0.75,1.5,\n"), std::string::npos);
  EXPECT_NE(csv.find("\noverall,ig,"), std::string::npos);
}
