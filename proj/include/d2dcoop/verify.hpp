#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace d2dcoop {

// One entry of the verification report. The measured string carries the
// numbers behind the verdict so a failure is diagnosable from the report
// alone.
struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string measured;
  double seconds = 0.0;
};

std::vector<int> all_criterion_ids();

// Runs one numbered criterion. Each is self-contained and deterministic:
// instances and experiment seeds are fixed inside this module, so repeat
// runs reproduce the same verdict. threads caps the worker count of the
// simulation-backed criteria (0 = hardware concurrency).
CriterionResult run_criterion(int id, int threads = 0);

std::vector<CriterionResult> run_criteria(const std::vector<int>& ids,
                                          int threads = 0);

// id,name,pass,measured,seconds with a header line.
void write_report_csv(std::ostream& out,
                      const std::vector<CriterionResult>& results);

}  // namespace d2dcoop
