#include "checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include <fmt/format.h>

#include "geomech/fieldcalc.hpp"
#include "geomech/fluid2d.hpp"
#include "geomech/geodesic.hpp"
#include "geomech/liegroup.hpp"
#include "geomech/rigidbody.hpp"

namespace geomech::checks {

namespace {

using Clock = std::chrono::steady_clock;
constexpr double kUnlimited = std::numeric_limits<double>::infinity();

double max_diff(const ScalarField& a, const ScalarField& b) { return (a.values - b.values).abs().maxCoeff(); }
double max_diff(const VectorField2& a, const VectorField2& b) { return std::max(max_diff(a.x, b.x), max_diff(a.y, b.y)); }

double rel(double value, double ref) { return std::abs(value - ref) / std::abs(ref); }

double shoelace(const Eigen::ArrayX2d& q) {
  double a = 0.0;
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    const Eigen::Index j = (i + 1) % q.rows();
    const double xi = q(i, 0) - q(0, 0), yi = q(i, 1) - q(0, 1);
    const double xj = q(j, 0) - q(0, 0), yj = q(j, 1) - q(0, 1);
    a += xi * yj - xj * yi;
  }
  return 0.5 * a;
}

CriterionResult pairing_identity() {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n01;
  auto v3 = [&] { return Vec3d(n01(rng), n01(rng), n01(rng)); };
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const AlgebraSE3 xi{v3(), v3()};
    const CoAlgebraSE3 mu{v3(), v3()};
    const AlgebraSE3 zeta{v3(), v3()};
    worst = std::max(worst, std::abs(pairing(ad_star(xi, mu), zeta) - pairing(mu, bracket(xi, zeta))));
  }
  return {.pass = worst < 1e-12, .detail = fmt::format("max residual {:.2e} over 1000 triples", worst)};
}

CriterionResult rigid_body() {
  const InertiaSpec<double> body(Vec3d(1, 2, 3).asDiagonal().toDenseMatrix(), 1.0);
  RigidBodyState<double> s0;
  s0.algebra = {Vec3d(1, 0.01, 0.01), Vec3d(1, 0, 0)};
  const auto traj = simulate(body, s0, 1e-3, 100000);
  const auto rows = diagnostics(body, traj);
  double de = 0.0, dc = 0.0, dm = 0.0;
  for (const auto& r : rows) {
    de = std::max(de, rel(r.energy, rows.front().energy));
    dc = std::max(dc, rel(r.casimir, rows.front().casimir));
    dm = std::max(dm, (r.spatial_momentum - rows.front().spatial_momentum).norm() / rows.front().spatial_momentum.norm());
  }

  RigidBodyState<double> other = s0;
  other.algebra.lin = Vec3d(-4, 2, 7);
  const auto traj2 = simulate(body, other, 1e-3, 100000);
  double split = 0.0;
  for (std::size_t i = 0; i < traj.states.size(); ++i)
    split = std::max(split, (traj.states[i].algebra.ang - traj2.states[i].algebra.ang).cwiseAbs().maxCoeff());

  return {.pass = de < 1e-8 && dc < 1e-8 && dm < 1e-8 && split == 0.0,
          .detail = fmt::format("energy {:.2e}, casimir {:.2e}, spatial momentum {:.2e}, omega(v0) split {:.1e}", de,
                                dc, dm, split)};
}

CriterionResult helmholtz() {
  const Grid g(64);
  std::mt19937_64 rng(3);
  double recon = 0.0, div = 0.0, orth = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const VectorField2 u = random_vector_field(g, 12, rng);
    const HelmholtzParts p = helmholtz_decompose(u);
    recon = std::max(recon, max_diff(p.divfree + p.gradient, u));
    div = std::max(div, divergence(p.divfree).max_abs());
    orth = std::max(orth, std::abs(inner_l2(p.divfree, p.gradient)));
  }
  return {.pass = recon < 1e-13 && div < 1e-11 && orth < 1e-11,
          .detail = fmt::format("reconstruction {:.2e}, divergence {:.2e}, orthogonality {:.2e}", recon, div, orth)};
}

CriterionResult covariant_identity() {
  const Grid g(64);
  std::mt19937_64 rng(4);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const VectorField2 v = random_vector_field(g, 8, rng);
    const VectorField2 u = random_vector_field(g, 8, rng);
    worst = std::max(worst, std::abs(inner_l2(covariant_derivative(v, u), u) - 0.5 * inner_l2(v, gradient(dot(u, u)))));
  }
  return {.pass = worst < 1e-10, .detail = fmt::format("max integrated residual {:.2e} over 100 pairs", worst)};
}

CriterionResult euler_conservation() {
  const FluidRun run = simulate(random_vorticity(Grid(128), 4, 5), 1e-3, 10000, {.record_every = 10000});
  const FluidDiagnostics& d0 = run.diagnostics.front();
  double de = 0.0, dz = 0.0;
  for (const auto& d : run.diagnostics) {
    de = std::max(de, rel(d.energy, d0.energy));
    dz = std::max(dz, rel(d.enstrophy, d0.enstrophy));
  }

  const ScalarField tg = taylor_green_vorticity(Grid(64));
  const FluidRun steady = simulate(tg, 1e-3, 10000, {.record_every = 100});
  double dev = 0.0;
  for (const auto& s : steady.states) dev = std::max(dev, max_diff(s.omega, tg));

  return {.pass = de < 1e-6 && dz < 1e-6 && dev < 1e-6,
          .detail = fmt::format("energy {:.2e}, enstrophy {:.2e} (n=128, T=10); Taylor-Green deviation {:.2e}", de, dz,
                                dev)};
}

CriterionResult so3_variation() {
  const double r1 = variation_check_so3(Vec3d::UnitX(), Vec3d::UnitY(), 1e-2, So3Family::Exponential);
  const double r2 = variation_check_so3(Vec3d::UnitX(), Vec3d::UnitY(), 5e-3, So3Family::Exponential);
  const double product = variation_check_so3(Vec3d::UnitX(), Vec3d::UnitY(), 1e-2);
  const double ratio = r1 / r2;
  return {.pass = ratio >= 3.5 && ratio <= 4.5,
          .detail = fmt::format("ratio {:.3f} (residual {:.2e} -> {:.2e}); product family residual {:.1e}", ratio, r1,
                                r2, product)};
}

CriterionResult action_slope() {
  const Grid g(64);
  double lo = 1e9, hi = -1e9, clo = 1e9, chi = -1e9;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const ScalarField w0 = random_vorticity(g, 4, seed, 2.0);
    PerturbationSpec spec;
    spec.stream_seed = 100 + seed;
    const double euler = first_variation(w0, spec, 1e-3).fitted_slope;
    FirstVariationOptions control;
    control.dynamics = BaseDynamics::FrozenVelocity;
    const double frozen = first_variation(w0, spec, 1e-3, control).fitted_slope;
    lo = std::min(lo, euler);
    hi = std::max(hi, euler);
    clo = std::min(clo, frozen);
    chi = std::max(chi, frozen);
  }
  return {.pass = lo >= 1.8 && hi <= 2.2 && clo >= 0.8 && chi <= 1.2,
          .detail = fmt::format("Euler slopes [{:.3f}, {:.3f}], frozen control [{:.3f}, {:.3f}] over 5 seeds", lo, hi,
                                clo, chi)};
}

CriterionResult volume_preservation() {
  const VelocityHistory src = VelocityHistory::steady(taylor_green_velocity(Grid(64)));
  const double side = 1e-4;
  Eigen::ArrayX2d quad(4, 2);
  quad << 1.0, 0.5, 1.0 + side, 0.5, 1.0 + side, 0.5 + side, 1.0, 0.5 + side;
  FlowMap fm = FlowMap::from_points(quad);
  const double a0 = shoelace(fm.positions);
  double worst = 0.0;
  for (int k = 0; k < 5000; ++k) {
    fm = advect_flowmap(fm, src, 1e-3);
    worst = std::max(worst, rel(shoelace(fm.positions), a0));
  }
  return {.pass = worst < 1e-5, .detail = fmt::format("max relative area drift {:.2e} over T=5", worst)};
}

Criterion timed(int id, std::string name, CriterionResult (*body)(), double budget = kUnlimited) {
  return {id, name, [id, name, body, budget] {
            const auto t0 = Clock::now();
            CriterionResult r = body();
            r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
            r.id = id;
            r.name = name;
            if (r.seconds >= budget) {
              r.pass = false;
              r.detail += fmt::format("; over the {:g} s budget", budget);
            }
            return r;
          }};
}

}  // namespace

std::vector<Criterion> acceptance_criteria() {
  return {
      timed(1, "ad* pairing identity", pairing_identity, 1.0),
      timed(2, "rigid body conservation", rigid_body, 10.0),
      timed(3, "Helmholtz decomposition", helmholtz, 30.0),
      timed(4, "covariant derivative identity", covariant_identity),
      timed(5, "Euler conservation", euler_conservation, 300.0),
      timed(6, "SO(3) variation identity", so3_variation),
      timed(7, "action first variation", action_slope, 600.0),
      timed(8, "volume preservation", volume_preservation),
  };
}

bool run_all(const std::vector<Criterion>& criteria, const std::function<void(const CriterionResult&)>& report) {
  bool ok = true;
  for (const auto& c : criteria) {
    CriterionResult r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r = {.id = c.id, .name = c.name, .pass = false, .detail = fmt::format("error: {}", e.what())};
    }
    ok = ok && r.pass;
    report(r);
  }
  return ok;
}

std::string format_line(const CriterionResult& r) {
  return fmt::format("{} {} {:<30} {} ({:.2f} s)", r.pass ? "PASS" : "FAIL", r.id, r.name, r.detail, r.seconds);
}

}  // namespace geomech::checks
