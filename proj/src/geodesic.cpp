#include "geomech/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

namespace geomech {

namespace {

using cd = std::complex<double>;

// Powers e^{i k x} for k in [-kmax, kmax], index k + kmax.
void phase_powers(double x, int kmax, std::vector<cd>& out) {
  out.assign(2 * kmax + 1, cd(1.0, 0.0));
  const cd e(std::cos(x), std::sin(x));
  for (int k = 1; k <= kmax; ++k) {
    out[kmax + k] = out[kmax + k - 1] * e;
    out[kmax - k] = std::conj(out[kmax + k]);
  }
}

}  // namespace

TrigStreamField::TrigStreamField(std::vector<Mode> modes) : modes_(std::move(modes)) {
  for (const Mode& m : modes_) kmax_ = std::max({kmax_, std::abs(m.kx), std::abs(m.ky)});
}

TrigStreamField TrigStreamField::random(std::uint64_t seed, int max_mode, double rms_speed) {
  if (max_mode < 1) throw InvalidArgument("stream function needs max_mode >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Mode> modes;
  for (int ky = 0; ky <= max_mode; ++ky)
    for (int kx = -max_mode; kx <= max_mode; ++kx) {
      if (ky == 0 && kx <= 0) continue;  // half plane: (k, -k) give the same real mode
      const double amp = 1.0 / (1.0 + kx * kx + ky * ky);
      const double a = amp * normal(rng);
      const double b = amp * normal(rng);
      modes.push_back({kx, ky, a, b});
    }
  TrigStreamField field(std::move(modes));
  const double scale = rms_speed / field.rms_speed();
  for (Mode& m : field.modes_) {
    m.cos_coef *= scale;
    m.sin_coef *= scale;
  }
  return field;
}

int TrigStreamField::max_mode() const { return kmax_; }

double TrigStreamField::rms_speed() const {
  double s = 0.0;
  for (const Mode& m : modes_) s += (m.kx * m.kx + m.ky * m.ky) * (m.cos_coef * m.cos_coef + m.sin_coef * m.sin_coef);
  return std::sqrt(0.5 * s);
}

Vec2d TrigStreamField::value(const Vec2d& x) const {
  thread_local std::vector<cd> px, py;
  phase_powers(x.x(), kmax_, px);
  phase_powers(x.y(), kmax_, py);
  Vec2d w = Vec2d::Zero();
  for (const Mode& m : modes_) {
    const cd e = px[kmax_ + m.kx] * py[kmax_ + m.ky];
    const double slope = -m.cos_coef * e.imag() + m.sin_coef * e.real();
    w.x() += m.ky * slope;
    w.y() -= m.kx * slope;
  }
  return w;
}

std::pair<Vec2d, Eigen::Matrix2d> TrigStreamField::value_and_jacobian(const Vec2d& x) const {
  thread_local std::vector<cd> px, py;
  phase_powers(x.x(), kmax_, px);
  phase_powers(x.y(), kmax_, py);
  Vec2d w = Vec2d::Zero();
  Eigen::Matrix2d dw = Eigen::Matrix2d::Zero();
  for (const Mode& m : modes_) {
    const cd e = px[kmax_ + m.kx] * py[kmax_ + m.ky];
    const double c = e.real(), s = e.imag();
    // chi_k = a cos + b sin; grad chi_k = k (-a sin + b cos); Hessian = -k k^T (a cos + b sin)
    const double slope = -m.cos_coef * s + m.sin_coef * c;
    const double curv = -(m.cos_coef * c + m.sin_coef * s);
    w.x() += m.ky * slope;
    w.y() -= m.kx * slope;
    dw(0, 0) += m.ky * m.kx * curv;
    dw(0, 1) += m.ky * m.ky * curv;
    dw(1, 0) -= m.kx * m.kx * curv;
    dw(1, 1) -= m.kx * m.ky * curv;
  }
  return {w, dw};
}

VectorField2 TrigStreamField::sample(const Grid& g) const {
  VectorField2 out(g);
  for (int i = 0; i < g.n(); ++i)
    for (int j = 0; j < g.n(); ++j) {
      const Vec2d w = value(Vec2d(g.coord(i), g.coord(j)));
      out.x.values(i, j) = w.x();
      out.y.values(i, j) = w.y();
    }
  return out;
}

Vec2d flow_point(const TrigStreamField& w, const Vec2d& x, double tau, int substeps) {
  const double h = tau / substeps;
  Vec2d p = x;
  for (int k = 0; k < substeps; ++k) {
    const Vec2d k1 = w.value(p);
    const Vec2d k2 = w.value(p + 0.5 * h * k1);
    const Vec2d k3 = w.value(p + 0.5 * h * k2);
    const Vec2d k4 = w.value(p + h * k3);
    p += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return p;
}

std::pair<Vec2d, Eigen::Matrix2d> flow_point_with_jacobian(const TrigStreamField& w, const Vec2d& x, double tau,
                                                           int substeps) {
  const double h = tau / substeps;
  Vec2d p = x;
  Eigen::Matrix2d jac = Eigen::Matrix2d::Identity();
  for (int k = 0; k < substeps; ++k) {
    const auto [v1, d1] = w.value_and_jacobian(p);
    const Eigen::Matrix2d j1 = d1 * jac;
    const auto [v2, d2] = w.value_and_jacobian(p + 0.5 * h * v1);
    const Eigen::Matrix2d j2 = d2 * (jac + 0.5 * h * j1);
    const auto [v3, d3] = w.value_and_jacobian(p + 0.5 * h * v2);
    const Eigen::Matrix2d j3 = d3 * (jac + 0.5 * h * j2);
    const auto [v4, d4] = w.value_and_jacobian(p + h * v3);
    const Eigen::Matrix2d j4 = d4 * (jac + h * j3);
    p += (h / 6.0) * (v1 + 2.0 * v2 + 2.0 * v3 + v4);
    jac += (h / 6.0) * (j1 + 2.0 * j2 + 2.0 * j3 + j4);
  }
  return {p, jac};
}

double variation_check_so3(const Vec3d& a, const Vec3d& b, double h, So3Family family) {
  if (!(h > 0.0)) throw InvalidStep("variation check requires h > 0");
  const double t = 0.3;
  const double e = 0.2;
  auto g = [&](double tt, double ee) -> Mat3d {
    if (family == So3Family::Exponential) return exp_so3(Vec3d(tt * a + ee * b));
    return exp_so3(Vec3d(tt * a)) * exp_so3(Vec3d(ee * b));
  };
  auto xi = [&](double tt, double ee) -> Mat3d {
    return g(tt, ee).transpose() * (g(tt + h, ee) - g(tt - h, ee)) / (2.0 * h);
  };
  auto eta = [&](double tt, double ee) -> Mat3d {
    return g(tt, ee).transpose() * (g(tt, ee + h) - g(tt, ee - h)) / (2.0 * h);
  };
  const Mat3d d_eps_xi = (xi(t, e + h) - xi(t, e - h)) / (2.0 * h);
  const Mat3d d_t_eta = (eta(t + h, e) - eta(t - h, e)) / (2.0 * h);
  const Mat3d x = xi(t, e);
  const Mat3d y = eta(t, e);
  return (d_eps_xi - d_t_eta - (x * y - y * x)).norm();
}

double PerturbationSpec::profile(double t) {
  // sin(pi t) evaluated from the nearer endpoint: s(0) = s(1) = 0 exactly
  return t > 0.5 ? std::sin(std::numbers::pi * (1.0 - t)) : std::sin(std::numbers::pi * t);
}

double PerturbationSpec::profile_rate(double t) { return std::numbers::pi * std::cos(std::numbers::pi * t); }

void PerturbationSpec::validate() const {
  if (max_mode < 1) throw InvalidArgument("perturbation max_mode must be at least 1");
  if (!(amplitude > 0.0)) throw InvalidArgument("perturbation amplitude must be positive");
  if (epsilons.empty()) throw InvalidArgument("perturbation needs at least one epsilon");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0)) throw InvalidArgument("epsilons must be positive");
    if (i > 0 && !(epsilons[i] < epsilons[i - 1])) throw InvalidArgument("epsilons must strictly decrease");
  }
}

TrigStreamField perturbation_field(const PerturbationSpec& spec) {
  spec.validate();
  return TrigStreamField::random(spec.stream_seed, spec.max_mode, spec.amplitude);
}

VectorField2 make_divfree_perturbation(const PerturbationSpec& spec, const Grid& grid) {
  if (3 * spec.max_mode > grid.n()) {
    throw BandLimitExceeded("max_mode " + std::to_string(spec.max_mode) + " exceeds n/3 for n = " +
                            std::to_string(grid.n()));
  }
  return perturbation_field(spec).sample(grid);
}

double path_action(const std::vector<VectorField2>& flow, double dt) {
  if (flow.size() < 2) throw TimeRangeError("path action needs at least two time samples");
  if (!(dt > 0.0) || std::abs(dt * static_cast<double>(flow.size() - 1) - 1.0) > 1e-9) {
    throw TimeRangeError("path action needs a uniform time grid covering [0, 1]");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < flow.size(); ++k) {
    const double e = 0.5 * inner_l2(flow[k], flow[k]);
    sum += (k == 0 || k + 1 == flow.size()) ? 0.5 * e : e;
  }
  return sum * dt;
}

VectorField2 right_translated_velocity(const VectorField2& v, const TrigStreamField& w, double tau, double rate,
                                       int substeps) {
  const Grid& g = v.grid();
  VectorField2 out(g);
  for (int i = 0; i < g.n(); ++i)
    for (int j = 0; j < g.n(); ++j) {
      const Vec2d y(g.coord(i), g.coord(j));
      const auto [p, jac] = flow_point_with_jacobian(w, y, tau, substeps);
      const Vec2d pushed = jac * Vec2d(v.x.values(i, j), v.y.values(i, j)) + rate * w.value(p);
      out.x.values(i, j) = pushed.x();
      out.y.values(i, j) = pushed.y();
    }
  return out;
}

std::vector<VectorField2> base_velocity_path(const ScalarField& omega0, double dt, BaseDynamics dynamics,
                                            double sample_dt) {
  if (!(dt > 0.0)) throw InvalidStep("base path requires dt > 0");
  const long steps = std::lround(1.0 / dt);
  const long stride = std::lround(sample_dt / dt);
  if (steps < 1 || std::abs(steps * dt - 1.0) > 1e-9) throw InvalidStep("dt must divide the unit interval");
  if (stride < 1 || std::abs(stride * dt - sample_dt) > 1e-9 * sample_dt || steps % stride != 0) {
    throw InvalidStep("sample_dt must be a multiple of dt dividing the unit interval");
  }

  std::vector<VectorField2> path;
  path.reserve(static_cast<std::size_t>(steps / stride) + 1);
  VorticityState state{omega0, 0.0};
  const VectorField2 v0 = velocity_from_vorticity(omega0);
  path.push_back(v0);

  const Grid& g = omega0.grid;
  auto frozen = [&](const FieldArray& w) { return advection_rhs(v0, ScalarField(g, w)).values; };
  const double frozen_limit = v0.max_abs() > 0.0 ? kCflNumber * g.spacing() / v0.max_abs() : INFINITY;

  for (long k = 1; k <= steps; ++k) {
    if (dynamics == BaseDynamics::Euler) {
      state = step(state, dt);
    } else {
      if (dt > frozen_limit) throw CflViolation("dt exceeds CFL bound of the frozen velocity");
      const FieldArray& w0 = state.omega.values;
      const FieldArray k1 = frozen(w0);
      const FieldArray k2 = frozen(w0 + 0.5 * dt * k1);
      const FieldArray k3 = frozen(w0 + 0.5 * dt * k2);
      const FieldArray k4 = frozen(w0 + dt * k3);
      state.omega = ScalarField(g, w0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    }
    state.time = static_cast<double>(k) * dt;
    if (k % stride == 0) path.push_back(velocity_from_vorticity(state.omega));
  }
  return path;
}

double fit_action_slope(const std::vector<std::pair<double, double>>& perturbed, double base_action) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& [eps, a] : perturbed) {
    const double d = std::abs(a - base_action);
    if (d > 1e-12) pts.emplace_back(eps, d);
  }
  std::sort(pts.begin(), pts.end());
  if (pts.size() > 3) pts.resize(3);
  if (pts.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(pts.size());
  for (const auto& [eps, d] : pts) {
    const double lx = std::log(eps), ly = std::log(d);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

ActionReport first_variation(const ScalarField& base_omega0, const PerturbationSpec& spec, double dt,
                             const FirstVariationOptions& options) {
  spec.validate();
  if (3 * spec.max_mode > base_omega0.grid.n()) throw BandLimitExceeded("perturbation band exceeds n/3");
  const TrigStreamField w = perturbation_field(spec);
  const std::vector<VectorField2> path = base_velocity_path(base_omega0, dt, options.dynamics, options.sample_dt);
  const double sample_dt = 1.0 / static_cast<double>(path.size() - 1);

  ActionReport report;
  report.base_action = path_action(path, sample_dt);
  std::vector<VectorField2> perturbed;
  perturbed.reserve(path.size());
  for (double eps : spec.epsilons) {
    perturbed.clear();
    for (std::size_t k = 0; k < path.size(); ++k) {
      const double t = static_cast<double>(k) * sample_dt;
      perturbed.push_back(right_translated_velocity(path[k], w, eps * PerturbationSpec::profile(t),
                                                    eps * PerturbationSpec::profile_rate(t), options.flow_substeps));
    }
    report.perturbed_actions.emplace_back(eps, path_action(perturbed, sample_dt));
  }
  report.fitted_slope = fit_action_slope(report.perturbed_actions, report.base_action);
  return report;
}

namespace {

// Right-reduced velocities of phi(t, eps) = B_{t eps} o A_t at the grid nodes.
// With z = A_t(phi^{-1}(y)) = B_{-t eps}(y):
//   v(y) = eps b(y) + DB_{t eps}(z) a(z),   u(y) = t b(y).
std::pair<VectorField2, VectorField2> reduced_velocities(const TrigStreamField& a, const TrigStreamField& b,
                                                         int substeps, const Grid& g, double t, double eps) {
  VectorField2 v(g), u(g);
  for (int i = 0; i < g.n(); ++i)
    for (int j = 0; j < g.n(); ++j) {
      const Vec2d y(g.coord(i), g.coord(j));
      const Vec2d z = flow_point(b, y, -t * eps, substeps);
      const Eigen::Matrix2d jac = flow_point_with_jacobian(b, z, t * eps, substeps).second;
      const Vec2d by = b.value(y);
      const Vec2d vy = eps * by + jac * a.value(z);
      v.x.values(i, j) = vy.x();
      v.y.values(i, j) = vy.y();
      u.x.values(i, j) = t * by.x();
      u.y.values(i, j) = t * by.y();
    }
  return {std::move(v), std::move(u)};
}

}  // namespace

double variation_check_sdiff(const SdiffFamily& family, const Grid& grid, double t, double eps, double h) {
  if (!(h > 0.0)) throw InvalidStep("variation check requires h > 0");
  const TrigStreamField a = TrigStreamField::random(family.seed_a, family.max_mode);
  const TrigStreamField b = TrigStreamField::random(family.seed_b, family.max_mode);
  const int m = family.substeps;

  const auto [v, u] = reduced_velocities(a, b, m, grid, t, eps);
  const VectorField2 v_plus = reduced_velocities(a, b, m, grid, t, eps + h).first;
  const VectorField2 v_minus = reduced_velocities(a, b, m, grid, t, eps - h).first;
  const VectorField2 u_plus = reduced_velocities(a, b, m, grid, t + h, eps).second;
  const VectorField2 u_minus = reduced_velocities(a, b, m, grid, t - h, eps).second;

  const VectorField2 d_eps_v = (1.0 / (2.0 * h)) * (v_plus - v_minus);
  const VectorField2 d_t_u = (1.0 / (2.0 * h)) * (u_plus - u_minus);
  return (d_eps_v - d_t_u + vf_bracket(v, u)).max_abs();
}

}  // namespace geomech
