#pragma once

#include <string>

#include "config.hpp"

namespace fswc::cli {

/// Dispatches a subcommand; writes artifacts plus manifest.json under out_dir.
/// Throws fswc errors; the caller maps them to exit codes.
void run_command(const std::string& command, ConfigMap cfg, const std::string& out_dir,
                 int threads);

}  // namespace fswc::cli
