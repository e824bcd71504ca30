#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "checks.hpp"
#include "experiments.hpp"
#include "geomech/errors.hpp"
#include "run_config.hpp"

namespace {

constexpr int kPass = 0;
constexpr int kError = 1;
constexpr int kThreshold = 2;

int run_command(const std::string& path, const std::string& output_dir, bool emit_svg) {
  using namespace geomech::cli;
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot read " << path << '\n';
    return kError;
  }
  std::stringstream text;
  text << in.rdbuf();
  RunConfig config = parse_config(text.str());
  if (!output_dir.empty()) config.output_dir = output_dir;
  if (emit_svg) config.emit_svg = true;

  const RunReport report = run(config);
  for (const auto& m : report.drifts)
    std::cout << fmt::format("{:<24} {:<12.4e} {:<14} {}\n", m.name, m.value, m.rule, m.pass ? "ok" : "FAIL");
  std::cout << fmt::format("{} {} in {:.2f} s -> {}\n", experiment_name(config.experiment),
                           report.pass ? "passed" : "FAILED", report.wall_time, config.output_dir);
  return report.pass ? kPass : kThreshold;
}

int selftest() {
  using namespace geomech::checks;
  std::cout << fmt::format("{:<4} {:<3} {:<30} {}\n", "", "#", "criterion", "measured");
  const bool ok = run_all(acceptance_criteria(), [](const CriterionResult& r) {
    std::cout << format_line(r) << std::endl;
  });
  std::cout << (ok ? "all criteria passed\n" : "some criteria FAILED\n");
  return ok ? kPass : kThreshold;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geometric mechanics experiments on se(3) and the flat 2-torus"};
  app.require_subcommand(1);

  std::string config_path, output_dir;
  bool emit_svg = false;
  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  run->add_option("config", config_path, "key = value config file")->required();
  run->add_option("--output-dir", output_dir, "Overrides output_dir from the config");
  run->add_flag("--emit-svg", emit_svg, "Also write SVG plots of the CSV output");
  auto* self = app.add_subcommand("selftest", "Run the acceptance suite and print a pass/fail table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kError;
  }

  try {
    if (*run) return run_command(config_path, output_dir, emit_svg);
    if (*self) return selftest();
  } catch (const geomech::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kError;
  }
  return kError;
}
