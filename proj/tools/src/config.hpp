#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "gpricing/features/dataset.hpp"
#include "gpricing/trainer/model.hpp"

namespace gpricing::cli {

/// Everything a command needs, read from an INI file. Relative data paths
/// are resolved against the directory holding the config file.
struct RunConfig {
  std::filesystem::path options;
  std::filesystem::path rv_forecast;
  std::filesystem::path guba_daily;  // optional; without it sentiment is zero
  features::SimulateConfig simulate;
  trainer::TrainPlan plan;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::filesystem::path out = "out";
  int ig_steps = 10;
  std::vector<double> sigma_grid;
  double r = 0.0;

  /// Throws ConfigError on empty seeds or out-of-range values.
  void validate() const;
};

/// Defaults for every key; see README for the key list.
RunConfig default_config();

/// Parses the INI file over the defaults. Unknown sections or keys and
/// malformed values raise ConfigError; a missing file raises DataError.
RunConfig load_config(const std::filesystem::path& path);

}  // namespace gpricing::cli
