#include <vector>

#include <benchmark/benchmark.h>

#include "gpricing/bsde/engine.hpp"
#include "gpricing/features/sentiment.hpp"
#include "gpricing/market/bsm.hpp"
#include "gpricing/market/gbm.hpp"
#include "gpricing/nets/network.hpp"

using namespace gpricing;

namespace {

PricingSample sample() {
  PricingSample s;
  s.contract = OptionContract{Date(2023, 3, 1), OptionType::call, 4000.0, 4050.0, 30, 120.0};
  s.moneyness = Moneyness::atm;
  s.daily_sigma = std::vector<double>(30, 0.2);
  s.sentiment.e = {0.1, -0.2, 0.05, 0.3, 0.6};
  return s;
}

void BM_GbmPaths(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::vector<double> sig(32, 0.2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(market::simulate_paths(4000.0, 0.0, sig, 1.0 / 365.0, n, 1));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * 32));
}
BENCHMARK(BM_GbmPaths)->Arg(16)->Arg(4096);

void BM_BsmPrice(benchmark::State& state) {
  double k = 3900.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(market::bsm_price(4000.0, k, 0.25, 0.2, 0.0, OptionType::call));
    k += 1e-9;
  }
}
BENCHMARK(BM_BsmPrice);

void BM_ValueForward(benchmark::State& state) {
  nets::AafNet net(nets::NetShape::value_net());
  nets::init_params(net, 1, 0.25);
  const auto B = state.range(0);
  Eigen::MatrixXd x = Eigen::MatrixXd::Random(nets::value_input::count, B);
  const Eigen::MatrixXd e = Eigen::MatrixXd::Random(kSentimentDim, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(net.forward(x, e, 0));
  }
  state.SetItemsProcessed(state.iterations() * B);
}
BENCHMARK(BM_ValueForward)->Arg(1)->Arg(16)->Arg(512)->Unit(benchmark::kMicrosecond);

// Loss and gradient for one contract at the full network size, the unit
// cost of a training step.
void BM_EngineContract(benchmark::State& state) {
  nets::AafNet v(nets::NetShape::value_net()), g(nets::NetShape::generator_net());
  nets::init_params(v, 1, 0.25);
  nets::init_params(g, 2, 0.25);
  const auto s = sample();
  const std::vector<const PricingSample*> batch{&s};
  bsde::EngineConfig cfg;
  cfg.steps = static_cast<int>(state.range(0));
  cfg.paths = static_cast<int>(state.range(1));
  const bsde::LossEngine engine(cfg);
  bsde::NetGradients grads;
  for (auto _ : state) {
    benchmark::DoNotOptimize(engine.evaluate(v, g, batch, 7, true, &grads));
  }
}
BENCHMARK(BM_EngineContract)->Args({8, 8})->Args({32, 16})->Unit(benchmark::kMillisecond);

void BM_SentimentHistory(benchmark::State& state) {
  std::vector<features::GubaDaily> days;
  for (int i = 0; i < state.range(0); ++i) {
    days.push_back({Date(2020, 1, 1).plus_days(i), 10.0 + i % 7, 5.0 + i % 3, 40.0, 1000.0, 50.0});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(features::SentimentHistory(days));
  }
}
BENCHMARK(BM_SentimentHistory)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
