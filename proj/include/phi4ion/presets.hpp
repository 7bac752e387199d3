#pragma once

#include <string>
#include <vector>

namespace phi4ion::io {

/// Built-in run configurations reproducing the published-figure pipelines.
/// Throws ConfigError for unknown names.
std::string preset_text(const std::string& name);

/// Command a preset belongs to.
std::string preset_command(const std::string& name);

std::vector<std::string> preset_names();

}  // namespace phi4ion::io
