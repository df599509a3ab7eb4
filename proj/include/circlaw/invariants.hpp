#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace circlaw {

struct InvariantResult {
  std::string name;
  bool pass = false;
  std::size_t cases = 0;
  double worst = 0.0;   // largest normalized violation seen (<= 1 means inside tolerance)
  std::string detail;
};

/// Exact algebraic identities at small n, checked against Eigen's dense
/// solvers as independent references.
std::vector<InvariantResult> run_invariant_suite(std::uint64_t seed);

}  // namespace circlaw
