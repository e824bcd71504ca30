#include "experiments.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>

#include <fmt/format.h>

#include "geomech/errors.hpp"
#include "geomech/field_io.hpp"
#include "geomech/fieldcalc.hpp"
#include "geomech/fluid2d.hpp"
#include "geomech/geodesic.hpp"
#include "geomech/rigidbody.hpp"
#include "svg.hpp"

namespace geomech::cli {

namespace fs = std::filesystem;

namespace {

std::string num(double v) { return fmt::format("{:.17g}", v); }

std::size_t step_count(double t_end, double dt) {
  const double n = std::round(t_end / dt);
  if (n < 1 || std::abs(n * dt - t_end) > 1e-9 * t_end) throw InvalidStep("t_end must be a positive multiple of dt");
  return static_cast<std::size_t>(n);
}

double rel(double value, double ref) { return ref != 0.0 ? std::abs(value - ref) / std::abs(ref) : std::abs(value); }

class Writer {
 public:
  Writer(const fs::path& dir, RunReport& report) : dir_(dir), report_(report) {}

  std::ofstream open(const std::string& name) {
    std::ofstream out(dir_ / name);
    if (!out) throw FormatError("cannot write " + (dir_ / name).string());
    report_.files.push_back(name);
    return out;
  }

  void plot(const std::string& csv, const std::string& svg, const PlotSpec& spec) {
    plot_csv(dir_ / csv, dir_ / svg, spec);
    report_.files.push_back(svg);
  }

 private:
  fs::path dir_;
  RunReport& report_;
};

void measure(RunReport& r, std::string name, double value, double threshold) {
  r.drifts.push_back({std::move(name), value, fmt::format("< {:g}", threshold), value < threshold});
}

void run_rigidbody(const RunConfig& c, RunReport& r, Writer& w) {
  Eigen::Matrix<double, 6, 1> upper;
  for (int k = 0; k < 6; ++k) upper(k) = c.inertia[static_cast<std::size_t>(k)];
  const auto body = InertiaSpec<double>::from_upper(upper, c.mass);
  RigidBodyState<double> s0;
  s0.algebra = {c.omega0, c.v0};
  const auto traj = simulate(body, s0, c.dt, step_count(c.t_end, c.dt));
  const auto rows = diagnostics(body, traj);

  {
    auto out = w.open("trajectory.csv");
    out << "t,R00,R01,R02,R10,R11,R12,R20,R21,R22,rx,ry,rz,wx,wy,wz,vx,vy,vz\n";
    for (const auto& s : traj.states) {
      out << num(s.time);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out << ',' << num(s.group.rot(i, j));
      for (const Vec3d* v : {&s.group.trans, &s.algebra.ang, &s.algebra.lin})
        for (int k = 0; k < 3; ++k) out << ',' << num((*v)(k));
      out << '\n';
    }
  }
  {
    auto out = w.open("diagnostics.csv");
    out << "t,energy,casimir,mx,my,mz\n";
    for (const auto& d : rows)
      out << num(d.time) << ',' << num(d.energy) << ',' << num(d.casimir) << ',' << num(d.spatial_momentum.x()) << ','
          << num(d.spatial_momentum.y()) << ',' << num(d.spatial_momentum.z()) << '\n';
  }

  double de = 0.0, dc = 0.0, dm = 0.0;
  const auto& d0 = rows.front();
  for (const auto& d : rows) {
    de = std::max(de, rel(d.energy, d0.energy));
    dc = std::max(dc, rel(d.casimir, d0.casimir));
    const double m0 = d0.spatial_momentum.norm();
    const double dd = (d.spatial_momentum - d0.spatial_momentum).norm();
    dm = std::max(dm, m0 > 0 ? dd / m0 : dd);
  }
  measure(r, "energy", de, 1e-8);
  measure(r, "casimir", dc, 1e-8);
  measure(r, "spatial_momentum", dm, 1e-8);

  if (c.emit_svg)
    w.plot("diagnostics.csv", "diagnostics.svg",
           {.title = "rigid body: conserved quantities", .x_column = "t",
            .y_columns = {"energy", "casimir", "mx", "my", "mz"}, .drift = true});
}

void run_fluid2d(const RunConfig& c, RunReport& r, Writer& w) {
  const Grid g(c.grid_n);
  const ScalarField omega0 =
      c.initial == "taylor-green" ? taylor_green_vorticity(g) : random_vorticity(g, c.max_mode, c.seed);
  const std::size_t n = step_count(c.t_end, c.dt);
  SimulateOptions opt;
  opt.record_every = n;
  opt.particles = FlowMap::from_grid(Grid(16));
  const FluidRun run = simulate(omega0, c.dt, n, opt);

  {
    auto out = w.open("diagnostics.csv");
    out << "t,energy,enstrophy,mean_vorticity,max_divergence\n";
    for (const auto& d : run.diagnostics)
      out << num(d.time) << ',' << num(d.energy) << ',' << num(d.enstrophy) << ',' << num(d.mean_vorticity) << ','
          << num(d.max_divergence) << '\n';
  }
  {
    auto out = w.open("particles.csv");
    write_particles_csv(out, run.flowmaps.back());
  }

  const auto& d0 = run.diagnostics.front();
  double de = 0.0, dz = 0.0, dmean = 0.0, div = 0.0;
  for (const auto& d : run.diagnostics) {
    de = std::max(de, rel(d.energy, d0.energy));
    dz = std::max(dz, rel(d.enstrophy, d0.enstrophy));
    dmean = std::max(dmean, std::abs(d.mean_vorticity - d0.mean_vorticity));
    div = std::max(div, d.max_divergence);
  }
  measure(r, "energy", de, 1e-6);
  measure(r, "enstrophy", dz, 1e-6);
  measure(r, "mean_vorticity", dmean, 1e-12);
  measure(r, "max_divergence", div, 1e-10);
  if (c.initial == "taylor-green")
    measure(r, "taylor_green_deviation", (run.states.back().omega.values - omega0.values).abs().maxCoeff(), 1e-6);

  if (c.emit_svg)
    w.plot("diagnostics.csv", "diagnostics.svg",
           {.title = "fluid2d: conserved quantities", .x_column = "t", .y_columns = {"energy", "enstrophy"},
            .drift = true});
}

void run_helmholtz(const RunConfig& c, RunReport& r, Writer& w) {
  const Grid g(c.grid_n);
  std::mt19937_64 rng(c.seed);
  const VectorField2 u = random_vector_field(g, c.max_mode, rng);
  const HelmholtzParts p = helmholtz_decompose(u);
  const VectorField2 back = p.divfree + p.gradient;
  const double recon =
      std::max((back.x.values - u.x.values).abs().maxCoeff(), (back.y.values - u.y.values).abs().maxCoeff());
  measure(r, "reconstruction", recon, 1e-13);
  measure(r, "divergence", divergence(p.divfree).max_abs(), 1e-11);
  measure(r, "orthogonality", std::abs(inner_l2(p.divfree, p.gradient)), 1e-11);

  auto out = w.open("helmholtz.csv");
  out << "quantity,value,rule\n";
  for (const auto& m : r.drifts) out << m.name << ',' << num(m.value) << ',' << m.rule << '\n';
}

void run_geodesic(const RunConfig& c, RunReport& r, Writer& w) {
  const Grid g(c.grid_n);
  PerturbationSpec spec;
  spec.stream_seed = c.seed + 100;
  spec.epsilons = c.epsilons;
  FirstVariationOptions opt;
  opt.dynamics = c.dynamics == "frozen" ? BaseDynamics::FrozenVelocity : BaseDynamics::Euler;
  const ActionReport a = first_variation(random_vorticity(g, c.max_mode, c.seed, 2.0), spec, c.dt, opt);

  {
    auto out = w.open("action_report.csv");
    out << "eps,A,abs_dA\n";
    out << num(0.0) << ',' << num(a.base_action) << ',' << num(0.0) << '\n';
    for (const auto& [eps, value] : a.perturbed_actions)
      out << num(eps) << ',' << num(value) << ',' << num(std::abs(value - a.base_action)) << '\n';
  }
  std::cout << fmt::format("fitted_slope = {:.6f}\n", a.fitted_slope);

  r.drifts.push_back({"fitted_slope", a.fitted_slope, ">= 1.8", a.fitted_slope >= 1.8});

  if (c.emit_svg)
    w.plot("action_report.csv", "action_report.svg",
           {.title = fmt::format("|A(eps) - A(0)|, fitted slope {:.3f}", a.fitted_slope), .x_column = "eps",
            .y_columns = {"abs_dA"}, .loglog = true});
}

void run_so3(const RunConfig& c, RunReport& r, Writer& w) {
  const So3Family family = c.family == "product" ? So3Family::Product : So3Family::Exponential;
  const double r1 = variation_check_so3(c.a, c.b, c.h, family);
  const double r2 = variation_check_so3(c.a, c.b, 0.5 * c.h, family);
  const double ratio = r1 / r2;
  {
    auto out = w.open("variation_so3.csv");
    out << "h,residual\n";
    out << num(c.h) << ',' << num(r1) << '\n' << num(0.5 * c.h) << ',' << num(r2) << '\n';
  }
  r.drifts.push_back({"residual_h", r1});
  r.drifts.push_back({"residual_h2", r2});
  r.drifts.push_back({"ratio", ratio, "in [3.5, 4.5]", ratio >= 3.5 && ratio <= 4.5});
}

}  // namespace

RunReport run(const RunConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  RunReport r;
  r.config = config;
  fs::create_directories(config.output_dir);
  Writer w(config.output_dir, r);
  switch (config.experiment) {
    case Experiment::RigidBody: run_rigidbody(config, r, w); break;
    case Experiment::Fluid2d: run_fluid2d(config, r, w); break;
    case Experiment::Helmholtz: run_helmholtz(config, r, w); break;
    case Experiment::GeodesicCheck: run_geodesic(config, r, w); break;
    case Experiment::VariationSo3: run_so3(config, r, w); break;
  }
  r.pass = std::all_of(r.drifts.begin(), r.drifts.end(), [](const Measurement& m) { return m.pass; });
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::ofstream out(fs::path(config.output_dir) / "report.json");
  if (!out) throw FormatError("cannot write report.json");
  out << to_json(r).dump(2) << '\n';
  return r;
}

nlohmann::ordered_json to_json(const RunReport& r) {
  nlohmann::ordered_json j;
  j["config"] = to_json(r.config);
  j["wall_time_s"] = r.wall_time;
  nlohmann::ordered_json drifts = nlohmann::ordered_json::object();
  for (const auto& m : r.drifts) {
    nlohmann::ordered_json e;
    e["value"] = m.value;
    if (!m.rule.empty()) e["rule"] = m.rule;
    e["pass"] = m.pass;
    drifts[m.name] = e;
  }
  j["drifts"] = drifts;
  j["files"] = r.files;
  j["pass"] = r.pass;
  return j;
}

}  // namespace geomech::cli
