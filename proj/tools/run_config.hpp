#pragma once

// Run configuration: flat "key = value" text, one pair per line, '#' starts a
// comment. Lists and vectors are whitespace-separated numbers.
//
//   experiment   rigidbody | fluid2d | helmholtz | geodesic-check | variation-so3   (required)
//   grid_n       64
//   dt           1e-3
//   t_end        10, or 1 for geodesic-check
//   seed         0
//   output_dir   output
//   emit_svg     false
//   rigidbody:      inertia (I11 I12 I13 I22 I23 I33), mass, omega0 (required); v0 = 0 0 0
//   fluid2d:        initial = random | taylor-green, max_mode = 4
//   helmholtz:      max_mode = 12
//   geodesic-check: epsilons = 0.1 0.05 0.025 0.0125, dynamics = euler | frozen, max_mode = 4
//   variation-so3:  a = 1 0 0, b = 0 1 0, h = 1e-2, family = exponential | product

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "geomech/liegroup.hpp"

namespace geomech::cli {

enum class Experiment { RigidBody, Fluid2d, Helmholtz, GeodesicCheck, VariationSo3 };

std::string_view experiment_name(Experiment e);

struct RunConfig {
  Experiment experiment = Experiment::RigidBody;
  int grid_n = 64;
  double dt = 1e-3;
  double t_end = 10.0;
  std::uint64_t seed = 0;
  std::string output_dir = "output";
  bool emit_svg = false;

  std::array<double, 6> inertia{};
  double mass = 1.0;
  Vec3d omega0 = Vec3d::Zero();
  Vec3d v0 = Vec3d::Zero();

  std::string initial = "random";
  int max_mode = 4;

  std::vector<double> epsilons;
  std::string dynamics = "euler";

  Vec3d a = Vec3d::UnitX();
  Vec3d b = Vec3d::UnitY();
  double h = 1e-2;
  std::string family = "exponential";
};

/// Throws ParseError (with the 1-based line) on malformed or invalid values
/// and unknown keys, MissingKey when a required key is absent.
RunConfig parse_config(std::string_view text);

/// The effective configuration, defaults included, restricted to the keys
/// that apply to the experiment.
nlohmann::ordered_json to_json(const RunConfig& c);

}  // namespace geomech::cli
