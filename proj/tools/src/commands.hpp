#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "config.hpp"

namespace gpricing::cli {

struct CommandOptions {
  std::optional<std::uint64_t> seed;  // overrides run.seeds
  std::optional<std::filesystem::path> out;
  std::string stage;   // "", "pretrain" or "finetune"
  std::string method = "ig";
};

// Each command writes its CSV/checkpoint outputs under the output directory
// and throws gpricing::Error subclasses on failure.
void cmd_simulate(const RunConfig& cfg, const CommandOptions& opt);
void cmd_features(const RunConfig& cfg, const CommandOptions& opt);
void cmd_train(const RunConfig& cfg, const CommandOptions& opt);
void cmd_price(const RunConfig& cfg, const CommandOptions& opt);
void cmd_evaluate(const RunConfig& cfg, const CommandOptions& opt);
void cmd_attribute(const RunConfig& cfg, const CommandOptions& opt);
void cmd_bsm_sweep(const RunConfig& cfg, const CommandOptions& opt);

}  // namespace gpricing::cli
