#pragma once

#include <exception>
#include <iosfwd>
#include <string>
#include <vector>

#include "nlburgers/config.hpp"
#include "nlburgers/diagnostics.hpp"

namespace nlb {

inline constexpr int kExitConfig = 2;
inline constexpr int kExitBlowUp = 3;
inline constexpr int kExitCheck = 4;

struct SubcommandResult {
  int exit_code = 0;
  std::vector<std::string> files;  // relative to output_dir
  std::vector<Verdict> verdicts;
};

/// assemble, eigs, run-det, run-sde, mc-moments, besov, weak-residual, convergence, check-all.
const std::vector<std::string>& subcommands();

/// Runs one pipeline, writes its CSVs and manifest.txt into cfg.output_dir.
/// Library errors propagate; exit_code is kExitCheck when a verdict failed.
/// `notes` (e.g. environment overrides) go into the manifest.
SubcommandResult run_subcommand(const std::string& name, const RunConfig& cfg, std::ostream& log,
                                const std::vector<std::string>& notes = {});

/// Exit code of an exception escaping run_subcommand: 2 config, 3 blow-up, 1 other.
int exit_code_for(const std::exception& e);

extern const char* const kCodeVersion;

}  // namespace nlb
