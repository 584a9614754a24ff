#pragma once

// The twelve acceptance criteria, each runnable on its own. Tolerances and
// instance counts are fixed here; only the seed varies.

#include <cstdint>
#include <string>
#include <vector>

namespace wvlab {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

inline constexpr int kCriterionCount = 12;
inline constexpr std::uint64_t kAcceptanceSeed = 20240611;

/// Throws DomainError for ids outside 1..kCriterionCount. Library errors
/// raised inside a criterion are caught and reported as a failed result.
CriterionResult run_criterion(int id, std::uint64_t seed = kAcceptanceSeed);

std::vector<CriterionResult> run_acceptance(std::uint64_t seed = kAcceptanceSeed);

/// "[PASS] 03 ex5 distances (0.01 s): detail"
std::string format_result(const CriterionResult& r);

}  // namespace wvlab
