#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "experiments.hpp"
#include "geomech/errors.hpp"
#include "run_config.hpp"

using namespace geomech;
using namespace geomech::cli;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t error_line(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

std::filesystem::path scratch(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("geomech_cli_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("parse a rigid body config") {
  const RunConfig c = parse_config("experiment = rigidbody\ninertia = 1 0 0 2 0 3\nmass = 1\nomega0 = 1 0.01 0.01\n");
  CHECK(c.experiment == Experiment::RigidBody);
  CHECK(c.inertia == std::array<double, 6>{1, 0, 0, 2, 0, 3});
  CHECK(c.mass == 1.0);
  CHECK(c.omega0 == Vec3d(1, 0.01, 0.01));
  CHECK(c.v0 == Vec3d::Zero());
  CHECK(c.dt == 1e-3);
  CHECK(c.t_end == 10.0);
  CHECK(c.seed == 0);
}

TEST_CASE("comments, blank lines and whitespace") {
  const RunConfig c = parse_config("# header\n\n  experiment=fluid2d   # trailing\n\tdt =  2e-3\r\n");
  CHECK(c.experiment == Experiment::Fluid2d);
  CHECK(c.dt == 2e-3);
}

TEST_CASE("defaults are echoed") {
  const auto j = to_json(parse_config("experiment = fluid2d\n"));
  CHECK(j["grid_n"] == 64);
  CHECK(j["dt"] == 1e-3);
  CHECK(j["t_end"] == 10.0);
  CHECK(j["seed"] == 0);

  const RunConfig g = parse_config("experiment = geodesic-check\n");
  CHECK(g.t_end == 1.0);
  CHECK(g.epsilons == std::vector<double>{0.1, 0.05, 0.025, 0.0125});
  CHECK(to_json(g)["epsilons"].size() == 4);
}

TEST_CASE("malformed configs") {
  CHECK_THROWS_AS(parse_config("dt = -1\n"), ParseError);
  CHECK(error_line("dt = -1\n") == 1);
  CHECK(error_line("experiment = fluid2d\n\nt_end = 0\n") == 3);
  CHECK(error_line("experiment = fluid2d\ncolour = red\n") == 2);
  CHECK(error_line("experiment = fluid2d\nmass = 1\n") == 2);
  CHECK(error_line("experiment = fluid2d\ndt = 1e-3\ndt = 2e-3\n") == 3);
  CHECK(error_line("experiment = fluid2d\ngrid_n = 31\n") == 2);
  CHECK(error_line("experiment = fluid2d\ngrid_n = 64.5\n") == 2);
  CHECK(error_line("experiment = fluid2d\ndt = fast\n") == 2);
  CHECK(error_line("experiment = fluid2d\ndt\n") == 2);
  CHECK(error_line("experiment = sailing\n") == 1);
  CHECK(error_line("experiment = geodesic-check\nt_end = 2\n") == 2);
  CHECK(error_line("experiment = geodesic-check\nepsilons = 0.1 0.2\n") == 2);
  CHECK(error_line("experiment = rigidbody\ninertia = 1 0 0 2 0\nmass = 1\nomega0 = 1 0 0\n") == 2);
  CHECK(error_line("experiment = variation-so3\nfamily = cayley\n") == 2);
}

TEST_CASE("missing keys") {
  try {
    parse_config("experiment = rigidbody\ninertia = 1 0 0 1 0 1\nomega0 = 1 0 0\n");
    FAIL("expected MissingKey");
  } catch (const MissingKey& e) {
    CHECK(e.key() == "mass");
  }
  CHECK_THROWS_AS(parse_config("grid_n = 64\n"), MissingKey);
  CHECK_THROWS_AS(parse_config(""), MissingKey);
}

TEST_CASE("rigid body run writes the documented files") {
  RunConfig c = parse_config("experiment = rigidbody\ninertia = 1 0 0 2 0 3\nmass = 1\nomega0 = 1 0.01 0.01\nt_end = 0.5\n");
  c.output_dir = scratch("rigidbody").string();
  const RunReport r = run(c);
  CHECK(r.pass);
  REQUIRE(r.drifts.size() == 3);

  std::ifstream traj(std::filesystem::path(c.output_dir) / "trajectory.csv");
  std::string header;
  std::getline(traj, header);
  CHECK(header == "t,R00,R01,R02,R10,R11,R12,R20,R21,R22,rx,ry,rz,wx,wy,wz,vx,vy,vz");
  std::size_t rows = 0;
  for (std::string line; std::getline(traj, line);) ++rows;
  CHECK(rows == 501);

  const auto report = nlohmann::json::parse(slurp(std::filesystem::path(c.output_dir) / "report.json"));
  CHECK(report["pass"] == true);
  CHECK(report["config"]["experiment"] == "rigidbody");
  CHECK(report["config"]["dt"] == 1e-3);
  CHECK(report["drifts"]["energy"]["pass"] == true);

  const auto first = slurp(std::filesystem::path(c.output_dir) / "trajectory.csv");
  run(c);
  CHECK(slurp(std::filesystem::path(c.output_dir) / "trajectory.csv") == first);
}

TEST_CASE("report pass follows the measurements") {
  RunConfig c = parse_config("experiment = variation-so3\nfamily = product\n");
  c.output_dir = scratch("so3").string();
  const RunReport r = run(c);
  CHECK_FALSE(r.pass);
  const auto report = nlohmann::json::parse(slurp(std::filesystem::path(c.output_dir) / "report.json"));
  CHECK(report["pass"] == false);
  CHECK(report["drifts"]["ratio"]["pass"] == false);
}

TEST_CASE("helmholtz residuals") {
  RunConfig c = parse_config("experiment = helmholtz\nseed = 3\n");
  c.output_dir = scratch("helmholtz").string();
  const RunReport r = run(c);
  CHECK(r.pass);
  REQUIRE(r.drifts.size() == 3);
  CHECK(r.drifts[0].name == "reconstruction");
  CHECK(r.drifts[1].name == "divergence");
  CHECK(r.drifts[2].name == "orthogonality");
}

TEST_CASE("step counts must divide the horizon") {
  RunConfig c = parse_config("experiment = fluid2d\ndt = 3e-3\nt_end = 0.01\n");
  c.output_dir = scratch("steps").string();
  CHECK_THROWS_AS(run(c), InvalidStep);
}
