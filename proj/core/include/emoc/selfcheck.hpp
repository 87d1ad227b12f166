#pragma once

// Built-in invariant suites behind the `check` subcommand: mesh
// conformity under random marking, operator symmetry/definiteness and
// exact reproduction of linear fields, projection properties, minimal
// bulk marking vs brute force, projected-gradient convergence, gradient
// consistency by finite differences, a manufactured zero-residual case,
// and quadrature exactness.

#include <string>
#include <vector>

namespace emoc {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

std::vector<CheckResult> run_selfchecks(unsigned seed);

bool all_passed(const std::vector<CheckResult>& results);

} // namespace emoc
