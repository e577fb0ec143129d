#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hbt/config.hpp"
#include "hbt/verify.hpp"

namespace hbt::cli {

enum ExitCode : int {
  kSuccess = 0,
  kValidationError = 1,
  kNonConvergence = 2,
  kVerificationFailure = 3,
};

struct RunOptions {
  std::filesystem::path out;  // output stem; files get suffixes such as ".csv"
  unsigned threads = 1;
  std::string timestamp;      // written to manifests; empty means current UTC time
};

struct CommandResult {
  int exit_code = kSuccess;
  std::vector<std::filesystem::path> files;
  std::string summary;
};

// Every command writes its files in index order from a single thread, so the
// bytes produced depend only on the configuration, never on `threads`.
// Invalid input raises std::invalid_argument (or a subclass), std::domain_error,
// or std::runtime_error for unwritable paths; callers map these to exit code 1.

/// <out>.csv over the phase grid plus <out>.manifest.json.
CommandResult cmd_closed_form(const RunConfig& cfg, const RunOptions& opt);

/// <out>.csv trajectory, <out>.dip.json, <out>.manifest.json. Exit 2 with the
/// partial trajectory written and flagged when the integrator does not converge.
CommandResult cmd_coulomb(const RunConfig& cfg, const RunOptions& opt);

/// <out>.csv screen pattern plus <out>.manifest.json.
CommandResult cmd_compose(const RunConfig& cfg, const RunOptions& opt);

/// One row per value of `parameter` (d, k, D or mu). Exit 3 if a scaling
/// check recorded in the manifest fails.
CommandResult cmd_sweep(const RunConfig& cfg, const std::string& parameter,
                        const std::vector<double>& values, const RunOptions& opt);

/// Fock-engine correlator against the closed form over the phase grid.
/// Exit 3 if the two-particle-truncated engine deviates by more than 1e-10.
CommandResult cmd_oracle(const RunConfig& cfg, const RunOptions& opt);

/// Runs verification suites; prints the text report and, when opt.out is set,
/// writes <out>.verify.json. Exit 3 on any failed check.
CommandResult cmd_verify(verify::Suite suite, const verify::Options& vopt, const RunOptions& opt);

}  // namespace hbt::cli
