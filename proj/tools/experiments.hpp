#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "run_config.hpp"

namespace geomech::cli {

struct Measurement {
  std::string name;
  double value = 0.0;
  std::string rule;  // e.g. "< 1e-08"; empty for values reported without a threshold
  bool pass = true;
};

struct RunReport {
  RunConfig config;
  double wall_time = 0.0;
  std::vector<Measurement> drifts;
  std::vector<std::string> files;  // written, relative to the output directory
  bool pass = false;
};

/// Runs the experiment, writing CSV (and optional SVG) files plus report.json
/// into config.output_dir.
RunReport run(const RunConfig& config);

nlohmann::ordered_json to_json(const RunReport& r);

}  // namespace geomech::cli
