#pragma once

#include <string>
#include <vector>

namespace speccoc {

struct CheckResult {
  std::string suite;
  std::string name;  // the invariant being checked
  bool ok = true;
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool ok() const;
};

// Suites: identities, oracles, towers, all. `corrupt` swaps a stock fixture
// for a deliberately broken one, so the identities suite must fail.
VerifyReport run_verify(const std::string& suite, bool corrupt = false);

}  // namespace speccoc
