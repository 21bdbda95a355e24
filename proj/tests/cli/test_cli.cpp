#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "config.hpp"
#include "gpricing/errors.hpp"
#include "gpricing/features/dataset.hpp"
#include "gpricing/market/bsm.hpp"
#include "gpricing/nets/checkpoint.hpp"

using namespace gpricing;
using namespace gpricing::cli;
namespace fs = std::filesystem;

namespace {

constexpr const char* kTinyConfig = R"([data]
options = data/options.csv
rv_forecast = data/rv_forecast.csv

[simulate]
contracts = 300
trading_days = 30

[run]
seeds = 1
out = out

[model]
embed = 4
hidden = 8,8

[pretrain]
steps = 8
warmup = 2
batch_size = 8
time_steps = 4
paths = 4

[finetune]
steps = 4
warmup = 1
batch_size = 8
time_steps = 4
paths = 4
)";

class CliDir : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / ("gpricing_cli_" + std::string(info->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) const {
    const auto p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  fs::path dir_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> out;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    out.push_back(cells);
  }
  return out;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(GPRICING_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

CommandOptions to(const fs::path& out) {
  CommandOptions o;
  o.out = out;
  return o;
}

}  // namespace

TEST_F(CliDir, DefaultsMirrorTheTrainingTable) {
  const auto c = default_config();
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{1, 2, 3, 4, 5}));
  EXPECT_EQ(c.plan.pretrain.steps, 3500);
  EXPECT_EQ(c.plan.finetune.steps, 5000);
  EXPECT_EQ(c.plan.value_shape.input_width(), 350);
  EXPECT_EQ(c.ig_steps, 10);
  EXPECT_EQ(c.sigma_grid.size(), 5u);
}

TEST_F(CliDir, LoadsKeysAndResolvesPaths) {
  const auto p = write("run.ini", kTinyConfig);
  const auto c = load_config(p);
  EXPECT_EQ(c.options, dir_ / "data/options.csv");
  EXPECT_EQ(c.out, dir_ / "out");
  EXPECT_EQ(c.simulate.contracts, 300);
  EXPECT_EQ(c.plan.pretrain.steps, 8);
  EXPECT_EQ(c.plan.finetune.paths, 4);
  EXPECT_EQ(c.plan.value_shape.embed, 4);
  EXPECT_EQ(c.plan.value_shape.hidden, (std::vector<int>{8, 8}));
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{1}));
}

TEST_F(CliDir, RejectsBadConfigs) {
  EXPECT_THROW(load_config(write("a.ini", "[run]\nbogus = 1\n")), ConfigError);
  EXPECT_THROW(load_config(write("b.ini", "[nowhere]\nx = 1\n")), ConfigError);
  EXPECT_THROW(load_config(write("c.ini", "[pretrain]\nsteps = many\n")), ConfigError);
  EXPECT_THROW(load_config(write("d.ini", "[run]\nseeds =\n")), ConfigError);
  EXPECT_THROW(load_config(write("e.ini", "[pretrain]\nsteps = 10\nwarmup = 10\n")), ConfigError);
  EXPECT_THROW(load_config(dir_ / "missing.ini"), DataError);
}

TEST_F(CliDir, SimulateIsByteReproducibleAndClean) {
  auto cfg = load_config(write("run.ini", kTinyConfig));
  cmd_simulate(cfg, to(dir_ / "a"));
  cmd_simulate(cfg, to(dir_ / "b"));
  EXPECT_EQ(slurp(dir_ / "a/options.csv"), slurp(dir_ / "b/options.csv"));
  EXPECT_EQ(slurp(dir_ / "a/rv_forecast.csv"), slurp(dir_ / "b/rv_forecast.csv"));
  const auto quotes = features::read_options_csv(dir_ / "a/options.csv");
  ASSERT_FALSE(quotes.empty());
  for (const auto& q : quotes) {
    EXPECT_GE(q.settlement, 0.2);
    EXPECT_EQ(q.settlement, market::bsm_price(q.underlying, q.strike, tau_years(q.tau_days),
                                              cfg.simulate.sigma_star, 0.0, q.type));
  }
}

TEST_F(CliDir, TrainEvaluateAttributeSweep) {
  auto cfg = load_config(write("run.ini", kTinyConfig));
  cmd_simulate(cfg, to(dir_ / "data"));
  const CommandOptions none;
  cmd_train(cfg, none);
  const auto seed_dir = dir_ / "out/seed-1";
  EXPECT_TRUE(fs::exists(seed_dir / "pretrain.ckpt"));
  EXPECT_TRUE(fs::exists(seed_dir / "model.ckpt"));
  EXPECT_FALSE(fs::exists(dir_ / "out/seed-2"));
  const auto trace = read_csv(seed_dir / "trace_pretrain.csv");
  EXPECT_EQ(trace.size(), 9u);
  const std::string model_bytes = slurp(seed_dir / "model.ckpt");

  // Fine-tuning alone from the saved pretrain checkpoint reproduces the model.
  CommandOptions ft;
  ft.stage = "finetune";
  cmd_train(cfg, ft);
  EXPECT_EQ(slurp(seed_dir / "model.ckpt"), model_bytes);

  cmd_evaluate(cfg, none);
  const auto report = read_csv(seed_dir / "report.csv");
  ASSERT_EQ(report.size(), 8u);
  EXPECT_EQ(report[1][0], "overall");
  for (std::size_t i = 1; i < report.size(); ++i) {
    if (report[i][1] != "0") {
      EXPECT_LE(std::stod(report[i][2]), std::stod(report[i][3])) << report[i][0];
    }
  }
  EXPECT_TRUE(fs::exists(dir_ / "out/report_mean.csv"));

  CommandOptions sh;
  sh.method = "shapley";
  cmd_attribute(cfg, sh);
  const auto abl = read_csv(seed_dir / "ablation.csv");
  ASSERT_GE(abl.size(), 2u);
  for (std::size_t i = 1; i < abl.size(); ++i) {
    const double e_none = std::stod(abl[i][1]), e_full = std::stod(abl[i][4]);
    const double phi_rv = std::stod(abl[i][5]), phi_sent = std::stod(abl[i][6]);
    EXPECT_NEAR(phi_rv + phi_sent, e_none - e_full, 1e-9 * (1 + std::abs(e_none)));
  }
  cmd_attribute(cfg, none);
  const auto ig = read_csv(seed_dir / "attribution_ig.csv");
  ASSERT_GE(ig.size(), 2u);
  EXPECT_EQ(ig[0], (std::vector<std::string>{"bucket", "method", "rv_share", "sent_share",
                                             "total_gain", "completeness_gap"}));

  cmd_bsm_sweep(cfg, none);
  const auto sweep = read_csv(dir_ / "out/bsm_sweep.csv");
  int argmins = 0;
  for (std::size_t i = 1; i < sweep.size(); ++i) {
    if (sweep[i][4] == "1") {
      ++argmins;
      EXPECT_NEAR(std::stod(sweep[i][2]), 0.20, 1e-12) << sweep[i][0];
    }
  }
  EXPECT_GE(argmins, 1);
}

TEST_F(CliDir, ExitCodes) {
  const auto good = write("run.ini", kTinyConfig);
  EXPECT_EQ(run_cli("--config " + good.string() + " bsm-sweep"), 3);  // options.csv missing
  EXPECT_EQ(run_cli("--config " + good.string() + " simulate --out " + (dir_ / "data").string()),
            0);
  EXPECT_EQ(run_cli("--config " + good.string() + " bsm-sweep"), 0);
  EXPECT_EQ(run_cli("--config " + good.string() + " no-such-command"), 1);
  EXPECT_EQ(run_cli(""), 1);
  const auto bad = write("bad.ini", "[run]\nbogus = 1\n");
  EXPECT_EQ(run_cli("--config " + bad.string() + " simulate"), 2);
  EXPECT_EQ(run_cli("--config " + (dir_ / "nope.ini").string() + " simulate"), 3);
}
