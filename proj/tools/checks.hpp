#pragma once

#include <functional>
#include <string>
#include <vector>

namespace geomech::checks {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct Criterion {
  int id;
  std::string name;
  std::function<CriterionResult()> run;
};

/// The eight acceptance criteria, in order. Each run() times itself.
std::vector<Criterion> acceptance_criteria();

/// Runs the criteria, calling `report` after each one. Returns true iff all pass.
bool run_all(const std::vector<Criterion>& criteria, const std::function<void(const CriterionResult&)>& report);

std::string format_line(const CriterionResult& r);

}  // namespace geomech::checks
