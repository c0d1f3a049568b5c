// One PASS/FAIL line per criterion; exit status 1 if any fails.
#include <cstdlib>
#include <iostream>
#include <string>

#include "distclust/acceptance.hpp"

int main(int argc, char** argv) {
  distclust::AcceptanceOptions opts;
  opts.data_dir = DISTCLUST_DATA_DIR;
  if (const char* s = std::getenv("DISTCLUST_SEED")) opts.seed = std::stoull(s);
  for (int i = 1; i < argc; ++i) opts.only.push_back(std::stoi(argv[i]));
  bool all = true;
  distclust::run_acceptance(opts, [&](const distclust::CriterionResult& r) {
    all &= r.pass;
    std::cout << distclust::format_criterion(r) << std::endl;
  });
  std::cout << (all ? "ALL CRITERIA PASSED" : "SOME CRITERIA FAILED") << std::endl;
  return all ? 0 : 1;
}
