#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace distclust {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;     // measured values behind the verdict
  double seconds = 0.0;
  double time_limit = 0.0;
};

struct AcceptanceOptions {
  std::uint64_t seed = 1;
  std::string data_dir;   // holds digits.csv; a synthetic stand-in is used when absent
  std::vector<int> only;  // empty runs all
};

/// Runs criteria 1 through 11 in order. `on_result` sees each result as it lands.
std::vector<CriterionResult> run_acceptance(
    const AcceptanceOptions& opts,
    const std::function<void(const CriterionResult&)>& on_result = {});

std::string format_criterion(const CriterionResult& r);

/// The CSV produced by the determinism criterion for one seed.
std::string determinism_csv(std::uint64_t seed);

}  // namespace distclust
