#pragma once

#include <string>

#include "cli/config.hpp"

namespace germrec::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitPrecondition = 2,
  kExitSupport = 3,
  kExitConvergence = 4,
  kExitCheckFailed = 5,
};

int exit_code_for(ErrorCode code);

// Runs one experiment and writes its CSV tables and summary.json into out_dir.
int run_command(const ExperimentConfig& cfg, const std::string& out_dir);

}  // namespace germrec::cli
