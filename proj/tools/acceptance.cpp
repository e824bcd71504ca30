#include <cstdio>

#include "checks.hpp"

int main() {
  const bool ok = geomech::checks::run_all(geomech::checks::acceptance_criteria(), [](const auto& r) {
    std::puts(geomech::checks::format_line(r).c_str());
    std::fflush(stdout);
  });
  std::puts(ok ? "acceptance: all criteria passed" : "acceptance: FAILED");
  return ok ? 0 : 1;
}
