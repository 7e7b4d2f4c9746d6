// Acceptance criteria: one line per criterion, nonzero exit if any fails.
// Pass criterion ids as arguments to run a subset.

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "cf/verify.hpp"

int main(int argc, char** argv) {
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::stoi(argv[i]));
  int failed = 0;
  for (int id = 1; id <= cf::kCriterionCount; ++id) {
    if (!ids.empty() && std::find(ids.begin(), ids.end(), id) == ids.end()) continue;
    const cf::CriterionResult r = cf::run_criterion(id);
    std::cout << cf::format(r) << std::endl;
    if (!r.pass) ++failed;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed")
            << std::endl;
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
