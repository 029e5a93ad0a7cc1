#include <cstdlib>
#include <cstring>
#include <iostream>
#include <string>

#include "regenlab/acceptance/acceptance.hpp"

// One line per criterion; exits nonzero when any criterion fails.
int main(int argc, char** argv) {
  regenlab::acceptance::AcceptanceOptions opts;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc) {
      opts.seed = std::stoull(argv[++i]);
    } else if (std::strcmp(argv[i], "--no-supplementary") == 0) {
      opts.supplementary = false;
    } else {
      opts.criteria.push_back(std::stoi(argv[i]));
    }
  }
  int failed = 0;
  for (int id : opts.criteria.empty() ? regenlab::acceptance::all_criteria() : opts.criteria) {
    const auto r = regenlab::acceptance::run_criterion(id, opts);
    std::cout << r.line() << std::endl;
    failed += !r.pass;
  }
  std::cout << (failed == 0 ? "all criteria pass" : std::to_string(failed) + " criteria fail") << std::endl;
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
