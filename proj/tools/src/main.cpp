#include <cstdlib>
#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "gpricing/errors.hpp"

namespace {

enum ExitCode : int { kOk = 0, kUsage = 1, kConfig = 2, kData = 3, kNumerical = 4 };

}  // namespace

int main(int argc, char** argv) {
  using namespace gpricing;
  CLI::App app{"gpricing: deep FBSDE option pricing with sentiment-gated networks"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  cli::CommandOptions opt;
  std::uint64_t seed = 0;
  std::string out;
  app.add_option("--config", config_path, "INI configuration file");
  auto* seed_opt = app.add_option("--seed", seed, "Run a single seed instead of run.seeds");
  auto* out_opt = app.add_option("--out", out, "Output directory (overrides run.out)");
  app.add_option("--stage", opt.stage, "train: run only this stage")
      ->check(CLI::IsMember({"pretrain", "finetune"}));
  app.add_option("--method", opt.method, "attribute: ig or shapley")
      ->check(CLI::IsMember({"ig", "shapley"}));

  struct Command {
    const char* name;
    const char* help;
    void (*run)(const cli::RunConfig&, const cli::CommandOptions&);
  };
  const Command commands[] = {
      {"simulate", "Write a synthetic Black-Scholes market (options.csv, rv_forecast.csv)",
       cli::cmd_simulate},
      {"features", "Write the assembled sentiment features and the feature manifest",
       cli::cmd_features},
      {"train", "Pretrain and fine-tune per seed; writes checkpoints and loss traces",
       cli::cmd_train},
      {"price", "Price every quote with each seed's model", cli::cmd_price},
      {"evaluate", "Metrics per bucket on each seed's test split, plus seed means",
       cli::cmd_evaluate},
      {"attribute", "Integrated-gradients or Shapley attribution on the test split",
       cli::cmd_attribute},
      {"bsm-sweep", "Monthly BSM error over a sigma grid", cli::cmd_bsm_sweep},
  };
  for (const auto& c : commands) {
    app.add_subcommand(c.name, c.help);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    cli::RunConfig cfg = config_path.empty() ? cli::default_config() : cli::load_config(config_path);
    if (*seed_opt) {
      opt.seed = seed;
    }
    if (*out_opt) {
      opt.out = out;
    }
    for (const auto& c : commands) {
      if (app.got_subcommand(c.name)) {
        c.run(cfg, opt);
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumerical;
  } catch (const Error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
  return kOk;
}
