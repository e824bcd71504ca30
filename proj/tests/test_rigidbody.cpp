#include <doctest.h>

#include <cmath>
#include <random>

#include "geomech/errors.hpp"
#include "geomech/rigidbody.hpp"
#include "support.hpp"

using namespace geomech;

namespace {

using Inertia = InertiaSpec<double>;
using State = RigidBodyState<double>;

Inertia diag123(double mass) { return Inertia(Vec3d(1, 2, 3).asDiagonal().toDenseMatrix(), mass); }

Inertia tilted_body() {
  const Mat3d q = exp_so3(Vec3d(0.4, -0.3, 0.8));
  return Inertia(q * Vec3d(1.0, 1.7, 2.6).asDiagonal() * q.transpose(), 1.3);
}

State initial(const Vec3d& w, const Vec3d& v) {
  State s;
  s.algebra = {w, v};
  return s;
}

Eigen::Matrix<double, 18, 1> flatten(const State& s) {
  Eigen::Matrix<double, 18, 1> x;
  x << s.group.rot.reshaped(), s.group.trans, s.algebra.ang, s.algebra.lin;
  return x;
}

State run(const Inertia& spec, const State& s0, double dt, double t_end) {
  const auto n = static_cast<std::size_t>(std::llround(t_end / dt));
  return simulate(spec, s0, dt, n).states.back();
}

}  // namespace

TEST_CASE("reduced Lagrangian") {
  const Inertia unit(Mat3d::Identity(), 1.0);
  CHECK(reduced_lagrangian(unit, AlgebraSE3{}) == 0.0);
  const AlgebraSE3 xi{Vec3d(1, 1, 1), Vec3d(1, 0, 0)};
  CHECK(reduced_lagrangian(diag123(2.0), xi) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(reduced_lagrangian(diag123(2.0), 2.0 * xi) == doctest::Approx(16.0).epsilon(1e-15));

  std::mt19937_64 rng(21);
  const Inertia body = tilted_body();
  for (int i = 0; i < 100; ++i) CHECK(reduced_lagrangian(body, testing::random_algebra(rng)) > 0.0);
}

TEST_CASE("Legendre transform") {
  const Inertia unit(Mat3d::Identity(), 1.0);
  std::mt19937_64 rng(22);
  const AlgebraSE3 any = testing::random_algebra(rng);
  const CoAlgebraSE3 same = legendre(unit, any);
  CHECK(same.angmom == any.ang);
  CHECK(same.linmom == any.lin);

  const CoAlgebraSE3 m = legendre(diag123(5.0), AlgebraSE3{Vec3d(1, 1, 1), Vec3d(0, 1, 0)});
  CHECK(m.angmom == Vec3d(1, 2, 3));
  CHECK(m.linmom == Vec3d(0, 5, 0));

  const Inertia body = tilted_body();
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const AlgebraSE3 xi = testing::random_algebra(rng);
    worst = std::max(worst, std::abs(pairing(legendre(body, xi), xi) - 2.0 * reduced_lagrangian(body, xi)));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("inertia validation") {
  Mat3d asym = Mat3d::Identity();
  asym(0, 1) = 1e-6;
  CHECK_THROWS_AS(Inertia(asym, 1.0), InvalidInertia);
  CHECK_THROWS_AS(Inertia(Vec3d(1, -2, 3).asDiagonal().toDenseMatrix(), 1.0), InvalidInertia);
  CHECK_THROWS_AS(Inertia(Mat3d::Identity(), 0.0), InvalidInertia);
  CHECK_THROWS_AS(Inertia(Mat3d::Identity(), -1.0), InvalidInertia);
  CHECK_THROWS_AS(Inertia(Mat3d::Identity(), std::nan("")), InvalidInertia);

  Eigen::Matrix<double, 6, 1> upper;
  upper << 2, 0.1, 0, 3, 0.2, 4;
  const Inertia spec = Inertia::from_upper(upper, 1.0);
  CHECK(spec.inertia()(1, 0) == 0.1);
  CHECK(spec.inertia()(2, 1) == 0.2);
  const Vec3d w(0.3, -1.1, 0.7);
  CHECK((spec.solve(spec.apply(w)) - w).norm() < 1e-14);
}

TEST_CASE("Euler-Poincare right-hand side") {
  const Inertia body = diag123(1.0);
  const AlgebraSE3 spin{Vec3d(0, 2.5, 0), Vec3d::Zero()};
  CHECK(ep_rhs(body, spin).norm() == 0.0);

  const AlgebraSE3 rhs = ep_rhs(body, AlgebraSE3{Vec3d(1, 1, 1), Vec3d::Zero()});
  CHECK((rhs.ang - Vec3d(-1, 1, -1.0 / 3.0)).norm() < 1e-15);
  CHECK(rhs.lin.norm() == 0.0);

  std::mt19937_64 rng(23);
  const Inertia tilted = tilted_body();
  double worst_ang = 0.0, worst_lin = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const AlgebraSE3 xi = testing::random_algebra(rng);
    const AlgebraSE3 f = ep_rhs(tilted, xi);
    const CoAlgebraSE3 m = ad_star(xi, legendre(tilted, xi));
    worst_ang = std::max(worst_ang, (tilted.apply(f.ang) - m.angmom).norm());
    worst_lin = std::max(worst_lin, (tilted.mass() * f.lin - m.linmom).norm());
  }
  CHECK(worst_ang < 1e-12);
  CHECK(worst_lin < 1e-12);
}

TEST_CASE("single step") {
  const Inertia body = diag123(1.0);
  CHECK_THROWS_AS(step(body, initial(Vec3d::UnitX(), Vec3d::Zero()), 0.0), InvalidStep);
  CHECK_THROWS_AS(step(body, initial(Vec3d::UnitX(), Vec3d::Zero()), -1e-3), InvalidStep);

  SUBCASE("principal-axis spin is a uniform rotation") {
    const double dt = 0.01;
    const State s = step(body, initial(Vec3d::UnitZ(), Vec3d::Zero()), dt);
    CHECK(s.algebra.ang == Vec3d::UnitZ());
    CHECK((s.group.rot - exp_so3(Vec3d(0, 0, dt))).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(s.time == dt);
  }

  SUBCASE("translation only") {
    const State s = run(body, initial(Vec3d::Zero(), Vec3d(1, 2, 0)), 0.1, 1.0);
    CHECK((s.group.trans - Vec3d(1, 2, 0)).norm() < 1e-14);
    CHECK(s.group.rot == Mat3d::Identity());
  }

  SUBCASE("zero linear velocity stays zero") {
    const State s = run(tilted_body(), initial(Vec3d(0.3, 1.2, -0.8), Vec3d::Zero()), 1e-2, 5.0);
    CHECK(s.algebra.lin.norm() == 0.0);
    CHECK(s.group.trans.norm() == 0.0);
  }

  SUBCASE("rotation stays on the group") {
    std::mt19937_64 rng(24);
    State s = initial(testing::random_vec3(rng, 2.0), testing::random_vec3(rng));
    double worst = 0.0;
    for (int i = 0; i < 2000; ++i) {
      s = step(tilted_body(), s, 5e-3);
      worst = std::max(worst, (s.group.rot.transpose() * s.group.rot - Mat3d::Identity()).norm());
    }
    CHECK(worst < 1e-12);
    CHECK(s.group.is_valid());
  }
}

TEST_CASE("fourth-order convergence") {
  const Inertia body = tilted_body();
  const State s0 = initial(Vec3d(0.9, -1.4, 1.1), Vec3d(0.5, 0.2, -0.7));
  const double t_end = 2.0;
  const auto x1 = flatten(run(body, s0, 0.04, t_end));
  const auto x2 = flatten(run(body, s0, 0.02, t_end));
  const auto x3 = flatten(run(body, s0, 0.01, t_end));
  const double order = std::log2((x1 - x2).norm() / (x2 - x3).norm());
  CHECK(order >= 3.7);
  CHECK(order <= 4.3);
}

TEST_CASE("simulate") {
  const Inertia body = tilted_body();
  const State s0 = initial(Vec3d(0.2, 0.5, 1.0), Vec3d(0.1, 0.0, 0.3));
  CHECK_THROWS_AS(simulate(body, s0, 1e-3, 0), InvalidStep);
  CHECK_THROWS_AS(simulate(body, s0, 0.0, 5), InvalidStep);

  const auto one = simulate(body, s0, 1e-2, 1);
  REQUIRE(one.states.size() == 2);
  CHECK(flatten(one.states[0]) == flatten(s0));
  CHECK(flatten(one.states[1]) == flatten(step(body, s0, 1e-2)));

  const auto traj = simulate(body, s0, 1e-3, 1000);
  REQUIRE(traj.states.size() == 1001);
  for (std::size_t i = 1; i < traj.states.size(); ++i) {
    CHECK(std::abs((traj.states[i].time - traj.states[i - 1].time) - 1e-3) < 1e-12 * 1e-3 * 1000);
  }
}

TEST_CASE("diagnostics and conservation") {
  const Inertia body = diag123(1.0);

  SUBCASE("single state") {
    RigidBodyTrajectory<double> t;
    t.states.push_back(initial(Vec3d(1, 2, 3), Vec3d::Zero()));
    CHECK(diagnostics(body, t).size() == 1);
    CHECK_THROWS_AS(diagnostics(body, RigidBodyTrajectory<double>{}), InvalidStep);
  }

  SUBCASE("relative equilibrium") {
    const auto rows = diagnostics(body, simulate(body, initial(Vec3d(0, 0, 1.5), Vec3d::Zero()), 1e-2, 500));
    for (const auto& r : rows) {
      CHECK(r.energy == rows.front().energy);
      CHECK(r.casimir == rows.front().casimir);
      CHECK((r.spatial_momentum - rows.front().spatial_momentum).norm() < 1e-15);
    }
  }

  SUBCASE("long run drifts") {
    const State s0 = initial(Vec3d(1, 0.01, 0.01), Vec3d(1, 0, 0));
    const auto rows = diagnostics(body, simulate(body, s0, 1e-3, 100000));
    double de = 0.0, dc = 0.0, dm = 0.0;
    for (const auto& r : rows) {
      de = std::max(de, std::abs(r.energy - rows.front().energy) / rows.front().energy);
      dc = std::max(dc, std::abs(r.casimir - rows.front().casimir) / rows.front().casimir);
      dm = std::max(dm, (r.spatial_momentum - rows.front().spatial_momentum).norm() /
                            rows.front().spatial_momentum.norm());
    }
    CHECK(de < 1e-8);
    CHECK(dc < 1e-8);
    CHECK(dm < 1e-8);
  }

  SUBCASE("angular motion ignores the linear velocity") {
    const auto a = simulate(body, initial(Vec3d(1, 0.3, -0.2), Vec3d(1, 0, 0)), 1e-3, 5000);
    const auto b = simulate(body, initial(Vec3d(1, 0.3, -0.2), Vec3d(-4, 2, 7)), 1e-3, 5000);
    bool identical = true;
    for (std::size_t i = 0; i < a.states.size(); ++i) {
      identical = identical && a.states[i].algebra.ang == b.states[i].algebra.ang &&
                  a.states[i].group.rot == b.states[i].group.rot;
    }
    CHECK(identical);
  }
}
