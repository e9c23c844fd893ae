#pragma once

#include <cstdint>
#include <string>
#include <vector>

// The verification suites: every numbered check pins an identity, asymptotic,
// duality relation, or Monte Carlo cross-validation of the library at a fixed
// tolerance. The CLI `verify` command and the acceptance test binary both run
// these; one line is reported per check.

namespace betacoal {

struct CheckResult {
  std::string id;
  std::string name;
  std::string suite; // identities | asymptotics | duality | montecarlo
  bool pass = false;
  bool soft = false; // warn-only: a failure is reported but never fatal
  double measured = 0.0;
  double threshold = 0.0;
  std::string note;
  double seconds = 0.0;
};

struct CheckOptions {
  uint64_t seed = 42;
  long long replicates_override = 0; // 0 = per-check defaults
  int threads = 0;
};

// suite: all | identities | asymptotics | duality | montecarlo
std::vector<CheckResult> run_checks(const std::string& suite,
                                    const CheckOptions& opts = {});

bool all_hard_passed(const std::vector<CheckResult>& results);
std::string format_check_line(const CheckResult& r);

} // namespace betacoal
