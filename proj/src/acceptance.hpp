#pragma once
#include <string>
#include <vector>

namespace pkpz {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

struct AcceptanceOptions {
  bool quick = false;     // smaller grids and trial counts
  std::vector<int> only;  // empty -> all 13
  unsigned long long seed = 20240611;
};

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& o = {});
const char* criterion_name(int id);  // "" outside 1..13
CriterionResult run_criterion(int id, const AcceptanceOptions& o = {});

}  // namespace pkpz
