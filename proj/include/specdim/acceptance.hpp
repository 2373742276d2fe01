#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace specdim {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  // Criterion ids to run; empty means all. Unknown ids are an error.
  std::vector<int> only;
  // Appends one artificially failing entry; also enabled by the environment
  // variable SPECDIM_VERIFY_INJECT_FAIL (exit-path test hook).
  bool inject_fail = false;
};

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options);

// One line per criterion plus a summary; returns true iff all passed.
bool print_acceptance(std::ostream& out,
                      const std::vector<CriterionResult>& results);

}  // namespace specdim
