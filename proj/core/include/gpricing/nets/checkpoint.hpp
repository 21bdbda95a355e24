#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gpricing/nets/network.hpp"

namespace gpricing::nets {

/// A set of named networks plus free-form metadata. Serialised as text with
/// one section per parameter slice; values are written as hexadecimal floats
/// so a write/read cycle is bitwise exact.
struct Checkpoint {
  std::map<std::string, std::string> meta;
  std::vector<std::pair<std::string, AafNet>> nets;

  /// Throws ConfigError if no net carries that label.
  const AafNet& net(const std::string& label) const;
  AafNet& net(const std::string& label);
};

inline constexpr int kCheckpointVersion = 1;

void write_checkpoint(std::ostream& os, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& is);

/// File variants; writes go through a temporary file and a rename.
void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace gpricing::nets
