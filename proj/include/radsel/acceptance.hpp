#pragma once

#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "radsel/experiments.hpp"

namespace radsel {

/// Verdict for one acceptance criterion.
struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;  // the numbers the verdict was based on
  double seconds = 0.0;
  std::vector<CheckRow> rows;
};

struct AcceptanceOptions {
  Budget budget = Budget::full;
  Seed seed = 42;
  unsigned threads = 0;
  std::set<int> only;  // empty: all criteria
};

/// Runs the acceptance criteria. The full budget uses the stated sample sizes
/// and tolerances; the fast budget shrinks n and the replicate counts and
/// widens Monte Carlo tolerances by sqrt(full reps / fast reps).
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options,
                                            std::ostream* progress = nullptr);

/// "[PASS] C2 title: detail (12.3 s)"; the timing suffix is optional so that
/// reports can be compared byte for byte.
std::string format_line(const CriterionResult& result, bool with_timing = true);

nlohmann::json to_json(const CriterionResult& result);

}  // namespace radsel
