#pragma once

#include <functional>
#include <string_view>

namespace gpricing::log {

enum class Level { info, warn };

using Sink = std::function<void(Level, std::string_view)>;

/// Replaces the process-wide sink (stderr by default); returns the previous one.
Sink set_sink(Sink sink);

void info(std::string_view message);
void warn(std::string_view message);

}  // namespace gpricing::log
