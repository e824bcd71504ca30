#pragma once

// Incompressible Euler on the flat 2-torus in vorticity-streamfunction form,
// plus Lagrangian particle tracking x' = v(x, t).

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "geomech/fieldcalc.hpp"

namespace geomech {

using Vec2d = Eigen::Vector2d;

/// Tolerance on max|div v| accepted by pressure_from_velocity.
inline constexpr double kDivergenceTolerance = 1e-8;
/// Courant number bound: dt <= kCflNumber * h / max|v|.
inline constexpr double kCflNumber = 0.5;

struct VorticityState {
  ScalarField omega;
  double time = 0.0;
};

struct FluidDiagnostics {
  double time = 0.0;
  double energy = 0.0;     // 1/2 int |v|^2
  double enstrophy = 0.0;  // 1/2 int omega^2
  double mean_vorticity = 0.0;
  double max_divergence = 0.0;
};

/// Particles carried by the flow. labels are the initial positions; positions
/// are wrapped into [0, 2pi)^2.
struct FlowMap {
  Eigen::ArrayX2d positions;
  Eigen::ArrayX2d labels;
  double time = 0.0;

  static FlowMap from_points(const Eigen::ArrayX2d& points, double t0 = 0.0);
  /// One particle per grid node (i h, j h), row-major.
  static FlowMap from_grid(const Grid& g, double t0 = 0.0);
  std::size_t size() const { return static_cast<std::size_t>(positions.rows()); }
};

/// Stream function psi with laplacian(psi) = -omega, zero mean.
ScalarField streamfunction(const ScalarField& omega);
/// v = (dy psi, -dx psi).
VectorField2 velocity_from_vorticity(const ScalarField& omega);
inline VectorField2 velocity_from_vorticity(const VorticityState& s) { return velocity_from_vorticity(s.omega); }

/// -(v . grad) omega, dealiased. v must be divergence-free for the
/// conservation properties to hold.
ScalarField advection_rhs(const VectorField2& v, const ScalarField& omega);
ScalarField vorticity_rhs(const VorticityState& s);

/// Largest stable step for the current state (infinity for a fluid at rest).
double cfl_limit(const VorticityState& s);

/// One classical RK4 step. Throws CflViolation when dt exceeds cfl_limit.
VorticityState step(const VorticityState& s, double dt);

/// Solve laplacian(p) = -div(nabla_v v), zero mean.
ScalarField pressure_from_velocity(const VectorField2& v);

FluidDiagnostics fluid_diagnostics(const VorticityState& s);

// --- interpolation and velocity sources --------------------------------------

/// Bicubic Hermite interpolant of a periodic field: 16 coefficients per cell
/// built from f, f_x, f_y, f_xy at the cell corners (derivatives spectral).
class BicubicSampler {
 public:
  explicit BicubicSampler(const ScalarField& f);

  double operator()(double x, double y) const;
  const Grid& grid() const { return grid_; }

 private:
  Grid grid_;
  FieldArray f_, fx_, fy_, fxy_;
};

/// A time-dependent velocity field that can be evaluated at arbitrary points.
class VelocitySource {
 public:
  virtual ~VelocitySource() = default;
  virtual Vec2d velocity(const Vec2d& x, double t) const = 0;
  virtual double t_begin() const { return -std::numeric_limits<double>::infinity(); }
  virtual double t_end() const { return std::numeric_limits<double>::infinity(); }
};

/// Stored Eulerian velocity slices: bicubic in space, linear in time between
/// the two bracketing slices. A single slice is treated as a steady field.
class VelocityHistory : public VelocitySource {
 public:
  VelocityHistory() = default;

  static VelocityHistory steady(const VectorField2& v);

  /// Slices must be appended in strictly increasing time.
  void append(double t, const VectorField2& v);
  /// Keep only the newest `count` slices.
  void keep_last(std::size_t count);

  Vec2d velocity(const Vec2d& x, double t) const override;
  double t_begin() const override;
  double t_end() const override;
  std::size_t size() const { return slices_.size(); }

 private:
  struct Slice {
    double time;
    std::shared_ptr<const BicubicSampler> x, y;
  };
  std::vector<Slice> slices_;
  bool steady_ = false;
};

/// Wrap a coordinate into [0, 2pi).
double wrap_coordinate(double x);

/// RK4 per particle over [fm.time, fm.time + dt]; throws TimeRangeError if
/// the source does not cover the interval.
FlowMap advect_flowmap(const FlowMap& fm, const VelocitySource& source, double dt);

struct SimulateOptions {
  /// Store every k-th Eulerian state (the initial and final states are always kept).
  std::size_t record_every = 1;
  std::optional<FlowMap> particles;
};

struct FluidRun {
  std::vector<VorticityState> states;
  std::vector<FlowMap> flowmaps;
  std::vector<FluidDiagnostics> diagnostics;  // one row per step, plus t0
};

FluidRun simulate(const ScalarField& omega0, double dt, std::size_t n_steps, const SimulateOptions& options = {});

// --- reference flows ----------------------------------------------------------

/// omega = 2 sin x sin y, the steady Taylor-Green vortex.
ScalarField taylor_green_vorticity(const Grid& g);
/// v = (sin x cos y, -cos x sin y).
VectorField2 taylor_green_velocity(const Grid& g);

/// Seeded random vorticity with max(|kx|,|ky|) <= max_mode whose velocity has
/// the given rms speed.
ScalarField random_vorticity(const Grid& g, int max_mode, std::uint64_t seed, double rms_speed = 1.0);

}  // namespace geomech
