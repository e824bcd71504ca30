#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <utility>

#include "geomech/errors.hpp"
#include "geomech/geodesic.hpp"

using namespace geomech;

namespace {

double max_diff(const ScalarField& a, const ScalarField& b) { return (a.values - b.values).abs().maxCoeff(); }
double max_diff(const VectorField2& a, const VectorField2& b) { return std::max(max_diff(a.x, b.x), max_diff(a.y, b.y)); }

std::vector<VectorField2> steady_path(const VectorField2& v, int samples) {
  return std::vector<VectorField2>(static_cast<std::size_t>(samples + 1), v);
}

}  // namespace

TEST_CASE("trigonometric stream fields") {
  const TrigStreamField w = TrigStreamField::random(9, 3, 1.5);
  CHECK(w.max_mode() == 3);
  CHECK(w.rms_speed() == doctest::Approx(1.5).epsilon(1e-14));
  CHECK_THROWS_AS(TrigStreamField::random(9, 0), InvalidArgument);

  const Grid g(32);
  const VectorField2 s = w.sample(g);
  CHECK(divergence(s).max_abs() < 1e-12);
  CHECK(std::sqrt(inner_l2(s, s) / kTorusArea) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(max_diff(s, TrigStreamField::random(9, 3, 1.5).sample(g)) == 0.0);

  const Vec2d x(0.7, 4.1);
  const auto [value, jac] = w.value_and_jacobian(x);
  CHECK((value - w.value(x)).norm() < 1e-14);
  const double h = 1e-6;
  Eigen::Matrix2d fd;
  fd.col(0) = (w.value(x + Vec2d(h, 0)) - w.value(x - Vec2d(h, 0))) / (2 * h);
  fd.col(1) = (w.value(x + Vec2d(0, h)) - w.value(x - Vec2d(0, h))) / (2 * h);
  CHECK((fd - jac).norm() < 1e-8);
  CHECK(std::abs(jac.trace()) < 1e-13);
}

TEST_CASE("flows of stream fields") {
  const TrigStreamField w = TrigStreamField::random(4, 2);
  const Vec2d x(1.3, 2.9);
  CHECK((flow_point(w, x, 0.0, 8) - x).norm() == 0.0);
  CHECK((flow_point(w, flow_point(w, x, 0.4, 32), -0.4, 32) - x).norm() < 1e-9);

  const auto [p, jac] = flow_point_with_jacobian(w, x, 0.4, 32);
  CHECK((p - flow_point(w, x, 0.4, 32)).norm() < 1e-15);
  CHECK(std::abs(jac.determinant() - 1.0) < 1e-9);
  const double h = 1e-6;
  Eigen::Matrix2d fd;
  fd.col(0) = (flow_point(w, x + Vec2d(h, 0), 0.4, 32) - flow_point(w, x - Vec2d(h, 0), 0.4, 32)) / (2 * h);
  fd.col(1) = (flow_point(w, x + Vec2d(0, h), 0.4, 32) - flow_point(w, x - Vec2d(0, h), 0.4, 32)) / (2 * h);
  CHECK((fd - jac).norm() < 1e-8);
}

TEST_CASE("matrix-group variation identity") {
  CHECK_THROWS_AS(variation_check_so3(Vec3d::UnitX(), Vec3d::UnitY(), 0.0), InvalidStep);

  const Vec3d a(0.3, -0.7, 1.1);
  CHECK(variation_check_so3(a, a, 1e-4) < 1e-10);
  CHECK(variation_check_so3(a, a, 1e-4, So3Family::Exponential) < 1e-10);

  const Vec3d b(0.5, 0.2, -0.4);
  CHECK(variation_check_so3(a, b, 1e-4) < 1e-6);
  CHECK(variation_check_so3(a, b, 1e-4, So3Family::Exponential) < 1e-6);

  SUBCASE("second-order convergence") {
    const double r1 = variation_check_so3(Vec3d::UnitX(), Vec3d::UnitY(), 1e-2, So3Family::Exponential);
    const double r2 = variation_check_so3(Vec3d::UnitX(), Vec3d::UnitY(), 5e-3, So3Family::Exponential);
    CHECK(r1 / r2 >= 3.5);
    CHECK(r1 / r2 <= 4.5);
  }

  SUBCASE("the product family satisfies the stencil exactly") {
    for (double h : {1e-1, 1e-2, 1e-3}) CHECK(variation_check_so3(Vec3d::UnitX(), Vec3d::UnitY(), h) < 1e-12);
  }
}

TEST_CASE("volume-preserving variation identity") {
  const Grid g(64);
  CHECK(variation_check_sdiff({.seed_a = 3, .seed_b = 3}, g, 0.3, 0.2, 1e-3) < 1e-6);

  const SdiffFamily generic{.seed_a = 1, .seed_b = 2};
  const double r1 = variation_check_sdiff(generic, g, 0.3, 0.2, 1e-2);
  const double r2 = variation_check_sdiff(generic, g, 0.3, 0.2, 5e-3);
  CHECK(r1 / r2 >= 3.0);
  CHECK(r1 / r2 <= 5.0);
  CHECK(variation_check_sdiff(generic, g, 0.3, 0.2, 1e-3) < 1e-3);
  CHECK_THROWS_AS(variation_check_sdiff(generic, g, 0.3, 0.2, -1.0), InvalidStep);
}

TEST_CASE("perturbation specification") {
  PerturbationSpec spec;
  CHECK_NOTHROW(spec.validate());
  CHECK(PerturbationSpec::profile(0.0) == 0.0);
  CHECK(PerturbationSpec::profile(1.0) == 0.0);
  CHECK(PerturbationSpec::profile(0.5) == 1.0);
  CHECK(PerturbationSpec::profile(0.25) == doctest::Approx(PerturbationSpec::profile(0.75)).epsilon(1e-15));
  CHECK(PerturbationSpec::profile_rate(0.0) == doctest::Approx(std::numbers::pi));

  spec.epsilons = {0.1, 0.1};
  CHECK_THROWS_AS(spec.validate(), InvalidArgument);
  spec.epsilons = {0.1, -0.05};
  CHECK_THROWS_AS(spec.validate(), InvalidArgument);
  spec.epsilons = {};
  CHECK_THROWS_AS(spec.validate(), InvalidArgument);
  spec = PerturbationSpec{};
  spec.amplitude = 0.0;
  CHECK_THROWS_AS(spec.validate(), InvalidArgument);
}

TEST_CASE("divergence-free perturbations") {
  const Grid g(64);
  PerturbationSpec spec;
  spec.stream_seed = 17;
  for (int m : {1, 2, 5}) {
    spec.max_mode = m;
    const VectorField2 w = make_divfree_perturbation(spec, g);
    CHECK(divergence(w).max_abs() < 1e-12);
    CHECK(max_diff(w, make_divfree_perturbation(spec, g)) == 0.0);
  }

  SUBCASE("max_mode 1 spans the eight lowest modes") {
    spec.max_mode = 1;
    const VectorField2 w = make_divfree_perturbation(spec, g);
    std::set<std::pair<int, int>> active;
    for (const ScalarField* c : {&w.x, &w.y}) {
      const Spectrum s = spectral::forward(*c);
      for (Eigen::Index i = 0; i < s.rows(); ++i)
        for (Eigen::Index j = 0; j < s.cols(); ++j) {
          if (std::abs(s(i, j)) < 1e-10 * g.n() * g.n()) continue;
          const int kx = spectral::wavenumber_x(g.n(), static_cast<int>(i));
          const int ky = static_cast<int>(j);
          active.insert({kx, ky});
          active.insert({-kx, -ky});
        }
    }
    CHECK(active.size() == 8);
    for (const auto& [kx, ky] : active) CHECK(std::max(std::abs(kx), std::abs(ky)) == 1);
  }

  SUBCASE("band limit") {
    spec.max_mode = 6;
    CHECK_THROWS_AS(make_divfree_perturbation(spec, Grid(16)), BandLimitExceeded);
    CHECK_NOTHROW(make_divfree_perturbation(spec, Grid(18)));
  }

  SUBCASE("perturbing flows preserve area") {
    spec.max_mode = 2;
    spec.amplitude = 1.0;
    const TrigStreamField w = perturbation_field(spec);
    const Vec2d c(2.0, 1.0);
    const double side = 1e-4;
    const std::array<Vec2d, 4> quad{c, c + Vec2d(side, 0), c + Vec2d(side, side), c + Vec2d(0, side)};
    auto area = [](const std::array<Vec2d, 4>& q) {
      double a = 0.0;
      for (int i = 0; i < 4; ++i) {
        const Vec2d p = q[i] - q[0], r = q[(i + 1) % 4] - q[0];
        a += p.x() * r.y() - r.x() * p.y();
      }
      return 0.5 * a;
    };
    const double a0 = area(quad);
    for (double t : {0.1, 0.3, 0.5, 0.9}) {
      std::array<Vec2d, 4> moved;
      for (int i = 0; i < 4; ++i) moved[i] = flow_point(w, quad[i], 0.1 * PerturbationSpec::profile(t), 16);
      CHECK(std::abs(area(moved) - a0) / a0 < 1e-5);
    }
  }
}

TEST_CASE("path action") {
  const Grid g(64);
  CHECK(path_action(steady_path(VectorField2(g), 10), 0.1) == 0.0);

  const VectorField2 tg = taylor_green_velocity(g);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  CHECK(path_action(steady_path(tg, 100), 0.01) == doctest::Approx(pi2).epsilon(1e-14));
  CHECK(path_action(steady_path(2.0 * tg, 100), 0.01) == doctest::Approx(4.0 * pi2).epsilon(1e-14));

  CHECK_THROWS_AS(path_action(steady_path(tg, 10), 0.01), TimeRangeError);
  CHECK_THROWS_AS(path_action({tg}, 1.0), TimeRangeError);

  SUBCASE("relabelling the grid leaves the action unchanged") {
    std::mt19937_64 rng(51);
    std::vector<VectorField2> path, relabelled;
    for (int k = 0; k <= 20; ++k) {
      const VectorField2 v = random_vector_field(g, 6, rng);
      VectorField2 r(g);
      for (int i = 0; i < g.n(); ++i)
        for (int j = 0; j < g.n(); ++j) {
          const int jj = (j + 3 * i + 7) % g.n();  // shear plus shift, a bijection of the nodes
          r.x.values(i, jj) = v.x.values(i, j);
          r.y.values(i, jj) = v.y.values(i, j);
        }
      path.push_back(v);
      relabelled.push_back(r);
    }
    const double a = path_action(path, 0.05);
    CHECK(std::abs(path_action(relabelled, 0.05) - a) / a < 1e-14);
  }
}

TEST_CASE("right-translated velocity") {
  const Grid g(32);
  std::mt19937_64 rng(52);
  const VectorField2 v = leray_project(random_vector_field(g, 4, rng));
  const TrigStreamField w = TrigStreamField::random(3, 2);
  CHECK(max_diff(right_translated_velocity(v, w, 0.0, 0.0), v) == 0.0);
  CHECK(max_diff(right_translated_velocity(v, w, 0.0, 0.5), v + 0.5 * w.sample(g)) < 1e-14);

  // steady self-transport: (Dpsi w)(y) = w(psi(y))
  const VectorField2 ws = w.sample(g);
  const VectorField2 moved = right_translated_velocity(ws, w, 0.2, 0.0, 64);
  double worst = 0.0;
  for (int i = 0; i < g.n(); ++i)
    for (int j = 0; j < g.n(); ++j) {
      const Vec2d y(g.coord(i), g.coord(j));
      const Vec2d expect = w.value(flow_point(w, y, 0.2, 64));
      worst = std::max(worst, (expect - Vec2d(moved.x.values(i, j), moved.y.values(i, j))).norm());
    }
  CHECK(worst < 1e-8);
}

TEST_CASE("action slope fit") {
  std::vector<std::pair<double, double>> quad, lin;
  for (double e : {0.1, 0.05, 0.025, 0.0125}) {
    quad.emplace_back(e, 3.0 + 7.0 * e * e);
    lin.emplace_back(e, 3.0 - 0.4 * e);
  }
  CHECK(fit_action_slope(quad, 3.0) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(fit_action_slope(lin, 3.0) == doctest::Approx(1.0).epsilon(1e-10));

  // only the three smallest eps count
  quad[0].second = 1e6;
  CHECK(fit_action_slope(quad, 3.0) == doctest::Approx(2.0).epsilon(1e-10));

  // points under the noise floor are skipped
  std::vector<std::pair<double, double>> floor{{0.1, 1.0 + 0.01}, {0.05, 1.0 + 0.0025}, {0.01, 1.0 + 1e-13}};
  CHECK(fit_action_slope(floor, 1.0) == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(std::isnan(fit_action_slope({{0.1, 2.0}, {0.05, 1.0}}, 1.0)));
}

TEST_CASE("base paths") {
  const Grid g(32);
  const ScalarField w0 = random_vorticity(g, 4, 1, 1.0);
  CHECK_THROWS_AS(base_velocity_path(w0, 0.003, BaseDynamics::Euler, 0.01), InvalidStep);
  CHECK_THROWS_AS(base_velocity_path(w0, 0.005, BaseDynamics::Euler, 0.0125), InvalidStep);
  CHECK_THROWS_AS(base_velocity_path(w0, 0.0, BaseDynamics::Euler, 0.01), InvalidStep);

  const auto euler = base_velocity_path(w0, 0.005, BaseDynamics::Euler, 0.05);
  const auto frozen = base_velocity_path(w0, 0.005, BaseDynamics::FrozenVelocity, 0.05);
  CHECK(euler.size() == 21);
  CHECK(frozen.size() == 21);
  CHECK(max_diff(euler.front(), frozen.front()) == 0.0);
  CHECK(max_diff(euler.back(), frozen.back()) > 1e-3);
  const double e0 = inner_l2(euler.front(), euler.front());
  CHECK(std::abs(inner_l2(euler.back(), euler.back()) - e0) / e0 < 1e-6);
}

TEST_CASE("first variation of the action") {
  const Grid g(32);
  PerturbationSpec spec;
  spec.stream_seed = 101;
  const double dt = 5e-3;

  SUBCASE("Euler paths are stationary") {
    for (std::uint64_t seed : {1, 2}) {
      const ActionReport r = first_variation(random_vorticity(g, 4, seed, 2.0), spec, dt);
      REQUIRE(r.perturbed_actions.size() == spec.epsilons.size());
      for (std::size_t i = 0; i < spec.epsilons.size(); ++i) CHECK(r.perturbed_actions[i].first == spec.epsilons[i]);
      CHECK(r.base_action == doctest::Approx(0.5 * 4.0 * kTorusArea).epsilon(1e-6));
      CHECK(r.fitted_slope >= 1.8);
      CHECK(r.fitted_slope <= 2.2);
    }
  }

  SUBCASE("the frozen-velocity control is not") {
    FirstVariationOptions opt;
    opt.dynamics = BaseDynamics::FrozenVelocity;
    const ActionReport r = first_variation(random_vorticity(g, 4, 1, 2.0), spec, dt, opt);
    CHECK(r.fitted_slope >= 0.8);
    CHECK(r.fitted_slope <= 1.2);
  }

  SUBCASE("slope does not depend on the scale of the eps list") {
    const ScalarField w0 = random_vorticity(g, 4, 3, 2.0);
    const double s1 = first_variation(w0, spec, dt).fitted_slope;
    for (double& e : spec.epsilons) e *= 0.5;
    const double s2 = first_variation(w0, spec, dt).fitted_slope;
    CHECK(std::abs(s1 - s2) < 0.05);
  }

  SUBCASE("band limit of the perturbation") {
    spec.max_mode = 11;
    CHECK_THROWS_AS(first_variation(random_vorticity(g, 4, 1, 1.0), spec, dt), BandLimitExceeded);
  }
}
