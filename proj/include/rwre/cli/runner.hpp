#pragma once

// Subcommand dispatch: every subcommand reads and validates its keys from an
// ExperimentConfig, runs the corresponding estimator, and fills a
// ReportEnvelope whose exit_code follows the shared convention.

#include <map>
#include <string>
#include <vector>

#include "rwre/cli/config.hpp"
#include "rwre/cli/report.hpp"
#include "rwre/stats.hpp"

namespace rwre::cli {

enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitInconclusive = 2, kExitUsage = 3 };

int exit_code_for(Verdict v);

const std::vector<std::string>& subcommands();

/// Effective configuration of `subcommand` with every key at its default.
std::map<std::string, std::string> defaults_for(const std::string& subcommand);

/// Validates the configuration (throwing UsageError with every violation)
/// and runs the subcommand.
ReportEnvelope run(const std::string& subcommand, ExperimentConfig cfg);

}  // namespace rwre::cli
