// Full verification battery: one line per criterion, nonzero exit on any
// failure.  Seed and tag filter can be overridden on the command line:
//   acceptance [seed] [tag-filter]
#include "progeq/criteria.hpp"

#include <cstdio>
#include <cstdlib>
#include <string>

int main(int argc, char** argv) {
  std::uint64_t seed = 0xACCE97ED5EEDULL;
  std::string filter;
  if (argc > 1) seed = std::strtoull(argv[1], nullptr, 0);
  if (argc > 2) filter = argv[2];

  int failures = 0;
  auto results = progeq::run_all_criteria(
      seed, filter, 4, [&](const progeq::CriterionResult& r) {
        std::printf("[%s] %2d %-40s %s\n", r.pass ? "PASS" : "FAIL", r.id,
                    r.name.c_str(), r.detail.c_str());
        std::fflush(stdout);
        failures += !r.pass;
      });
  std::printf("%zu criteria, %d failed\n", results.size(), failures);
  return failures == 0 ? 0 : 1;
}
