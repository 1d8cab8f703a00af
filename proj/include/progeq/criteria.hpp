#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace progeq {

struct CriterionResult {
  int id = 0;
  std::string name;
  std::string tag;
  bool pass = false;
  std::string detail;  // expected vs observed summary
};

// The twelve-point verification battery.  `filter` selects by tag substring
// (empty runs everything).  Deterministic for a fixed seed.  `on_result`,
// when set, is invoked with each criterion's result as soon as it finishes.
std::vector<CriterionResult> run_all_criteria(
    std::uint64_t seed, const std::string& filter = "", int threads = 4,
    const std::function<void(const CriterionResult&)>& on_result = nullptr);

}  // namespace progeq
