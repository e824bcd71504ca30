#pragma once

// Numerical checks of the variational structure:
//  * the matrix-group identity d_eps xi - d_t eta = [xi, eta] on SO(3),
//  * its volume-preserving-diffeomorphism analogue d_eps v - d_t u = -[v, u],
//  * stationarity of the kinetic-energy action at Euler solutions: perturbing
//    the flow by phi_eps(t) = psi_{eps s(t)} o phi(t), with psi the flow of a
//    divergence-free field w and s(t) = sin(pi t), changes the action by
//    O(eps^2) for an Euler path and by O(eps) otherwise.

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "geomech/fieldcalc.hpp"
#include "geomech/fluid2d.hpp"
#include "geomech/liegroup.hpp"

namespace geomech {

/// Divergence-free field w = (dy chi, -dx chi) of a trigonometric stream
/// function chi = sum_k a_k cos(k.x) + b_k sin(k.x). Evaluated exactly at
/// arbitrary points, together with its Jacobian.
class TrigStreamField : public VelocitySource {
 public:
  struct Mode {
    int kx;
    int ky;
    double cos_coef;
    double sin_coef;
  };

  explicit TrigStreamField(std::vector<Mode> modes);

  /// Seeded random stream function on max(|kx|,|ky|) <= max_mode, scaled so
  /// the field's root-mean-square speed equals rms_speed.
  static TrigStreamField random(std::uint64_t seed, int max_mode, double rms_speed = 1.0);

  Vec2d value(const Vec2d& x) const;
  /// Value and Jacobian Dw (rows: components, columns: d/dx, d/dy).
  std::pair<Vec2d, Eigen::Matrix2d> value_and_jacobian(const Vec2d& x) const;
  Vec2d velocity(const Vec2d& x, double /*t*/) const override { return value(x); }

  VectorField2 sample(const Grid& g) const;
  const std::vector<Mode>& modes() const { return modes_; }
  int max_mode() const;
  double rms_speed() const;

 private:
  std::vector<Mode> modes_;
  int kmax_ = 0;
};

/// Time-tau flow of a steady field by RK4 with a fixed number of substeps.
/// Coordinates are not wrapped.
Vec2d flow_point(const TrigStreamField& w, const Vec2d& x, double tau, int substeps);

/// Flow together with its spatial Jacobian, integrated from the variational
/// equation J' = Dw(x) J alongside the trajectory.
std::pair<Vec2d, Eigen::Matrix2d> flow_point_with_jacobian(const TrigStreamField& w, const Vec2d& x, double tau,
                                                           int substeps);

// --- finite-dimensional variation identity --------------------------------------

enum class So3Family {
  Product,      // g = exp(t hat a) exp(eps hat b)
  Exponential,  // g = exp(t hat a + eps hat b)
};

/// |d_eps xi - d_t eta - [xi, eta]|_F at (t, eps) = (0.3, 0.2), with
/// xi = g^{-1} d_t g and eta = g^{-1} d_eps g, all derivatives by central
/// differences of step h. The residual is O(h^2) for the exponential family;
/// for the product family the stencil satisfies the identity exactly and only
/// roundoff remains.
double variation_check_so3(const Vec3d& a, const Vec3d& b, double h, So3Family family = So3Family::Product);

// --- perturbations and action ------------------------------------------------------

struct PerturbationSpec {
  std::uint64_t stream_seed = 0;
  int max_mode = 2;
  /// Root-mean-square speed of the perturbing field w.
  double amplitude = 0.02;
  std::vector<double> epsilons{1e-1, 5e-2, 2.5e-2, 1.25e-2};

  /// Endpoint-fixing time profile s(t) = sin(pi t) and its derivative.
  static double profile(double t);
  static double profile_rate(double t);

  void validate() const;
};

/// Samples of w = (dy chi, -dx chi) for the seeded stream function of `spec`.
/// Throws BandLimitExceeded when 3 * max_mode > n.
VectorField2 make_divfree_perturbation(const PerturbationSpec& spec, const Grid& grid);
TrigStreamField perturbation_field(const PerturbationSpec& spec);

/// Trapezoidal quadrature of E(v(t)) = 1/2 <v, v> over a uniform grid on [0, 1].
double path_action(const std::vector<VectorField2>& flow, double dt);

/// v_eps o psi for v_eps = psi_* v + rate * w and psi the time-tau flow of w:
/// (Dpsi v)(y) + rate * w(psi(y)) at every grid node y. Same L2 norm as v_eps,
/// psi being area-preserving.
VectorField2 right_translated_velocity(const VectorField2& v, const TrigStreamField& w, double tau, double rate,
                                       int substeps = 4);

enum class BaseDynamics {
  Euler,           // omega' = -v(t) . grad omega
  FrozenVelocity,  // omega' = -v(0) . grad omega, not an Euler solution
};

struct FirstVariationOptions {
  BaseDynamics dynamics = BaseDynamics::Euler;
  /// Spacing of the action quadrature; must be a multiple of the solver step.
  double sample_dt = 0.01;
  int flow_substeps = 4;
};

struct ActionReport {
  double base_action = 0.0;
  std::vector<std::pair<double, double>> perturbed_actions;  // (eps, A(eps)), aligned with spec.epsilons
  double fitted_slope = 0.0;
};

/// Base path over [0, 1] from `base_omega0`, then the action of each perturbed
/// path and the log-log slope of |A(eps) - A(0)| against eps.
ActionReport first_variation(const ScalarField& base_omega0, const PerturbationSpec& spec, double dt,
                             const FirstVariationOptions& options = {});

/// Least-squares slope of log|dA| vs log eps over the three smallest eps
/// whose |dA| exceeds 1e-12. Returns NaN when fewer than two points qualify.
double fit_action_slope(const std::vector<std::pair<double, double>>& perturbed, double base_action);

/// Base paths solved by the requested dynamics, sampled every sample_dt.
std::vector<VectorField2> base_velocity_path(const ScalarField& omega0, double dt, BaseDynamics dynamics,
                                            double sample_dt);

// --- infinite-dimensional variation identity -----------------------------------------

/// Two-parameter family phi(t, eps) = B_{t eps} o A_t generated by the flows
/// of two seeded divergence-free fields a and b.
struct SdiffFamily {
  std::uint64_t seed_a = 1;
  std::uint64_t seed_b = 2;
  int max_mode = 2;
  int substeps = 64;
};

/// Max-abs of d_eps v - d_t u + [v, u] on the grid at (t, eps), where
/// v = d_t phi o phi^{-1}, u = d_eps phi o phi^{-1}. v and u come from the
/// flows and their Jacobians; d_eps and d_t are central differences of step h
/// and the bracket is spectral.
double variation_check_sdiff(const SdiffFamily& family, const Grid& grid, double t, double eps, double h);

}  // namespace geomech
