#include "geomech/fluid2d.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace geomech {

namespace {

using spectral::deriv_kx;
using spectral::deriv_ky;

constexpr std::complex<double> kI(0.0, 1.0);

// psi_hat = omega_hat / |k|^2 on modes the derivative symbol sees.
Spectrum streamfunction_hat(const Spectrum& omega_hat, int n) {
  Spectrum psi = Spectrum::Zero(omega_hat.rows(), omega_hat.cols());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= n / 2; ++j) {
      const double kx = deriv_kx(n, i);
      const double ky = deriv_ky(n, j);
      const double k2 = kx * kx + ky * ky;
      if (k2 != 0.0) psi(i, j) = omega_hat(i, j) / k2;
    }
  return psi;
}

Spectrum times_ik(const Spectrum& s, int n, Axis axis) {
  Spectrum out(s.rows(), s.cols());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= n / 2; ++j) out(i, j) = kI * (axis == Axis::X ? deriv_kx(n, i) : deriv_ky(n, j)) * s(i, j);
  return out;
}

// -(v . grad omega) from a dealiased vorticity spectrum: v is then band
// limited as well, so the product is exact on the retained modes.
ScalarField rhs_from_truncated(const Grid& g, const Spectrum& omega_hat) {
  const int n = g.n();
  const Spectrum psi = streamfunction_hat(omega_hat, n);
  const ScalarField vx = spectral::inverse(g, times_ik(psi, n, Axis::Y));
  const ScalarField vy = spectral::inverse(g, -times_ik(psi, n, Axis::X));
  const ScalarField wx = spectral::inverse(g, times_ik(omega_hat, n, Axis::X));
  const ScalarField wy = spectral::inverse(g, times_ik(omega_hat, n, Axis::Y));
  ScalarField adv(g, -(vx.values * wx.values + vy.values * wy.values));
  Spectrum a = spectral::forward(adv);
  spectral::dealias(a, n);
  return spectral::inverse(g, a);
}

}  // namespace

FlowMap FlowMap::from_points(const Eigen::ArrayX2d& points, double t0) {
  if (points.rows() < 1) throw InvalidArgument("flow map needs at least one particle");
  FlowMap fm;
  fm.labels = points;
  fm.positions = points.unaryExpr([](double c) { return wrap_coordinate(c); });
  fm.time = t0;
  return fm;
}

FlowMap FlowMap::from_grid(const Grid& g, double t0) {
  const int n = g.n();
  Eigen::ArrayX2d pts(n * n, 2);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      pts(i * n + j, 0) = g.coord(i);
      pts(i * n + j, 1) = g.coord(j);
    }
  return from_points(pts, t0);
}

ScalarField streamfunction(const ScalarField& omega) {
  return spectral::inverse(omega.grid, streamfunction_hat(spectral::forward(omega), omega.grid.n()));
}

VectorField2 velocity_from_vorticity(const ScalarField& omega) {
  const Grid& g = omega.grid;
  const int n = g.n();
  const Spectrum psi = streamfunction_hat(spectral::forward(omega), n);
  return {spectral::inverse(g, times_ik(psi, n, Axis::Y)), spectral::inverse(g, -times_ik(psi, n, Axis::X))};
}

ScalarField advection_rhs(const VectorField2& v, const ScalarField& omega) {
  require_same_grid(v.grid(), omega.grid);
  const VectorField2 grad = gradient(omega);
  // dot() truncates both factors and the result to the 2/3 band
  return -1.0 * dot(v, grad);
}

ScalarField vorticity_rhs(const VorticityState& s) {
  Spectrum w = spectral::forward(s.omega);
  spectral::dealias(w, s.omega.grid.n());
  return rhs_from_truncated(s.omega.grid, w);
}

double cfl_limit(const VorticityState& s) {
  const double vmax = velocity_from_vorticity(s.omega).max_abs();
  if (vmax == 0.0) return std::numeric_limits<double>::infinity();
  return kCflNumber * s.omega.grid.spacing() / vmax;
}

VorticityState step(const VorticityState& s, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidStep("fluid step requires dt > 0");
  const double limit = cfl_limit(s);
  if (dt > limit) {
    throw CflViolation("dt = " + std::to_string(dt) + " exceeds CFL bound " + std::to_string(limit));
  }
  const Grid& g = s.omega.grid;
  auto rhs = [&](const FieldArray& w) { return vorticity_rhs({ScalarField(g, w), 0.0}).values; };
  const FieldArray& w0 = s.omega.values;
  const FieldArray k1 = rhs(w0);
  const FieldArray k2 = rhs(w0 + 0.5 * dt * k1);
  const FieldArray k3 = rhs(w0 + 0.5 * dt * k2);
  const FieldArray k4 = rhs(w0 + dt * k3);
  return {ScalarField(g, w0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)), s.time + dt};
}

ScalarField pressure_from_velocity(const VectorField2& v) {
  const double div = divergence(v).max_abs();
  if (div > kDivergenceTolerance) {
    throw NotDivergenceFree("velocity divergence " + std::to_string(div) + " exceeds tolerance");
  }
  const VectorField2 adv = covariant_derivative(v, v);
  return solve_poisson(-1.0 * divergence(adv));
}

FluidDiagnostics fluid_diagnostics(const VorticityState& s) {
  const VectorField2 v = velocity_from_vorticity(s.omega);
  FluidDiagnostics d;
  d.time = s.time;
  d.energy = 0.5 * inner_l2(v, v);
  d.enstrophy = 0.5 * inner_l2(s.omega, s.omega);
  d.mean_vorticity = s.omega.mean();
  d.max_divergence = divergence(v).max_abs();
  return d;
}

// --- interpolation ------------------------------------------------------------

BicubicSampler::BicubicSampler(const ScalarField& f) : grid_(f.grid), f_(f.values) {
  const ScalarField dx = ddx(f, Axis::X);
  fx_ = dx.values;
  fy_ = ddx(f, Axis::Y).values;
  fxy_ = ddx(dx, Axis::Y).values;
}

double BicubicSampler::operator()(double x, double y) const {
  const int n = grid_.n();
  const double h = grid_.spacing();
  const double sx = wrap_coordinate(x) / h;
  const double sy = wrap_coordinate(y) / h;
  int i0 = static_cast<int>(std::floor(sx));
  int j0 = static_cast<int>(std::floor(sy));
  const double s = sx - i0;
  const double t = sy - j0;
  i0 %= n;
  j0 %= n;
  const int i1 = (i0 + 1) % n;
  const int j1 = (j0 + 1) % n;

  // Hermite basis: value weights H0, H1 and slope weights G0, G1.
  const double s2 = s * s, s3 = s2 * s, t2 = t * t, t3 = t2 * t;
  const double hs[2] = {2 * s3 - 3 * s2 + 1, -2 * s3 + 3 * s2};
  const double gs[2] = {(s3 - 2 * s2 + s) * h, (s3 - s2) * h};
  const double ht[2] = {2 * t3 - 3 * t2 + 1, -2 * t3 + 3 * t2};
  const double gt[2] = {(t3 - 2 * t2 + t) * h, (t3 - t2) * h};
  const int is[2] = {i0, i1};
  const int js[2] = {j0, j1};

  double acc = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const int i = is[a], j = js[b];
      acc += hs[a] * ht[b] * f_(i, j) + gs[a] * ht[b] * fx_(i, j) + hs[a] * gt[b] * fy_(i, j) +
             gs[a] * gt[b] * fxy_(i, j);
    }
  return acc;
}

double wrap_coordinate(double x) {
  double r = std::fmod(x, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;  // fmod(-tiny) + 2pi can round up to 2pi
  return r;
}

VelocityHistory VelocityHistory::steady(const VectorField2& v) {
  VelocityHistory h;
  h.append(0.0, v);
  h.steady_ = true;
  return h;
}

void VelocityHistory::append(double t, const VectorField2& v) {
  if (!slices_.empty() && !(t > slices_.back().time)) {
    throw TimeRangeError("velocity slices must have increasing times");
  }
  slices_.push_back({t, std::make_shared<BicubicSampler>(v.x), std::make_shared<BicubicSampler>(v.y)});
}

void VelocityHistory::keep_last(std::size_t count) {
  if (slices_.size() > count) slices_.erase(slices_.begin(), slices_.end() - static_cast<std::ptrdiff_t>(count));
}

double VelocityHistory::t_begin() const {
  if (steady_) return VelocitySource::t_begin();
  return slices_.empty() ? std::numeric_limits<double>::quiet_NaN() : slices_.front().time;
}

double VelocityHistory::t_end() const {
  if (steady_) return VelocitySource::t_end();
  return slices_.empty() ? std::numeric_limits<double>::quiet_NaN() : slices_.back().time;
}

Vec2d VelocityHistory::velocity(const Vec2d& x, double t) const {
  if (slices_.empty()) throw TimeRangeError("velocity history is empty");
  if (steady_ || slices_.size() == 1) {
    const Slice& s = slices_.front();
    if (!steady_ && std::abs(t - s.time) > 1e-12 * std::max(1.0, std::abs(t))) {
      throw TimeRangeError("time outside the stored velocity slices");
    }
    return {(*s.x)(x.x(), x.y()), (*s.y)(x.x(), x.y())};
  }
  const double tol = 1e-12 * std::max(1.0, std::abs(t));
  if (t < slices_.front().time - tol || t > slices_.back().time + tol) {
    throw TimeRangeError("time " + std::to_string(t) + " outside the stored velocity slices");
  }
  auto it = std::upper_bound(slices_.begin(), slices_.end(), t,
                             [](double tt, const Slice& s) { return tt < s.time; });
  if (it == slices_.begin()) ++it;
  if (it == slices_.end()) --it;
  const Slice& b = *it;
  const Slice& a = *(it - 1);
  const double theta = std::clamp((t - a.time) / (b.time - a.time), 0.0, 1.0);
  const Vec2d va((*a.x)(x.x(), x.y()), (*a.y)(x.x(), x.y()));
  const Vec2d vb((*b.x)(x.x(), x.y()), (*b.y)(x.x(), x.y()));
  return (1.0 - theta) * va + theta * vb;
}

FlowMap advect_flowmap(const FlowMap& fm, const VelocitySource& source, double dt) {
  if (!(dt > 0.0)) throw InvalidStep("particle step requires dt > 0");
  const double t0 = fm.time;
  const double t1 = t0 + dt;
  const double tol = 1e-12 * std::max(1.0, std::abs(t1));
  if (t0 < source.t_begin() - tol || t1 > source.t_end() + tol) {
    throw TimeRangeError("velocity source does not span the particle step");
  }
  FlowMap out = fm;
  const double th = t0 + 0.5 * dt;
  for (Eigen::Index p = 0; p < fm.positions.rows(); ++p) {
    const Vec2d x0 = fm.positions.row(p).transpose().matrix();
    const Vec2d k1 = source.velocity(x0, t0);
    const Vec2d k2 = source.velocity(x0 + 0.5 * dt * k1, th);
    const Vec2d k3 = source.velocity(x0 + 0.5 * dt * k2, th);
    const Vec2d k4 = source.velocity(x0 + dt * k3, t1);
    const Vec2d x1 = x0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    out.positions(p, 0) = wrap_coordinate(x1.x());
    out.positions(p, 1) = wrap_coordinate(x1.y());
  }
  out.time = t1;
  return out;
}

FluidRun simulate(const ScalarField& omega0, double dt, std::size_t n_steps, const SimulateOptions& options) {
  if (!(dt > 0.0)) throw InvalidStep("fluid simulate requires dt > 0");
  const std::size_t every = std::max<std::size_t>(1, options.record_every);
  FluidRun run;
  VorticityState state{omega0, 0.0};
  run.states.push_back(state);
  run.diagnostics.push_back(fluid_diagnostics(state));

  std::optional<FlowMap> particles = options.particles;
  VelocityHistory history;
  if (particles) {
    particles->time = state.time;
    run.flowmaps.push_back(*particles);
    history.append(state.time, velocity_from_vorticity(state.omega));
  }

  for (std::size_t k = 1; k <= n_steps; ++k) {
    VorticityState next = step(state, dt);
    next.time = static_cast<double>(k) * dt;
    if (particles) {
      history.append(next.time, velocity_from_vorticity(next.omega));
      history.keep_last(2);
      *particles = advect_flowmap(*particles, history, next.time - particles->time);
      particles->time = next.time;
    }
    state = std::move(next);
    run.diagnostics.push_back(fluid_diagnostics(state));
    if (k % every == 0 || k == n_steps) {
      run.states.push_back(state);
      if (particles) run.flowmaps.push_back(*particles);
    }
  }
  return run;
}

ScalarField taylor_green_vorticity(const Grid& g) {
  return ScalarField::sample(g, [](double x, double y) { return 2.0 * std::sin(x) * std::sin(y); });
}

VectorField2 taylor_green_velocity(const Grid& g) {
  return VectorField2::sample(
      g, [](double x, double y) { return std::sin(x) * std::cos(y); },
      [](double x, double y) { return -std::cos(x) * std::sin(y); });
}

ScalarField random_vorticity(const Grid& g, int max_mode, std::uint64_t seed, double rms_speed) {
  std::mt19937_64 rng(seed);
  ScalarField w = random_scalar_field(g, max_mode, rng);
  const VectorField2 v = velocity_from_vorticity(w);
  w *= rms_speed / std::sqrt(inner_l2(v, v) / kTorusArea);
  return w;
}

}  // namespace geomech
