#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nlburgers/diagnostics.hpp"

namespace nlb {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  std::vector<Verdict> verdicts;
};

struct AcceptanceOptions {
  int threads = 1;
  std::string scratch_dir = "acceptance_scratch";  // used by the reproducibility check
  std::ostream* progress = nullptr;
};

/// Criteria 1..10 in order. Expensive Monte Carlo runs are shared between
/// the criteria that read them.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts, const std::vector<int>& only = {});

/// One line per criterion: `criterion N [PASS|FAIL] title: detail`.
std::string format_line(const CriterionResult& r);

}  // namespace nlb
