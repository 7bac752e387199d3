#pragma once

#include <string>
#include <vector>

#include "phi4ion/config.hpp"
#include "phi4ion/table.hpp"

namespace phi4ion::io {

struct CommandOutput {
    /// Tables with a file-name suffix ("" for the primary one).
    std::vector<std::pair<std::string, ResultTable>> tables;
};

/// Runs one of the batch commands: critical-line, mass-contour,
/// critical-ratio, ion-couplings, phase-map, convergence. Strictly validates
/// the configuration and stamps each table with the config digest and the
/// effective configuration.
CommandOutput run_command(RunConfig& config, int threads);

std::vector<std::string> command_names();

}  // namespace phi4ion::io
