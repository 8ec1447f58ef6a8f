#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace specdep {

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Closed-form parity, additivity, Parseval oracle and df table.
std::vector<SuiteResult> run_selftest();

/// Prints one "PASS name" / "FAIL name: detail" line per suite; true iff all pass.
bool report_selftest(const std::vector<SuiteResult>& results, std::ostream& out);

}  // namespace specdep
