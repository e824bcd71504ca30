#pragma once

// Free rigid body as a left-invariant Euler-Poincare system on SE(3).
//
// Reduced state xi = (omega, v) obeys
//   I omega' = (I omega) x omega,   v' = v x omega,
// and the group path is reconstructed from R' = R hat(omega), r' = R v.
// One step advances (omega, v, r) with classical RK4 and R with RKMK4, so R
// stays on SO(3) to rounding error without re-orthonormalization.

#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "geomech/errors.hpp"
#include "geomech/liegroup.hpp"

namespace geomech {

inline constexpr double kInertiaSymmetryTolerance = 1e-12;

/// Symmetric positive-definite inertia tensor plus total mass. The tensor is
/// diagonalized once; the inverse is applied through the eigenbasis.
template <typename Scalar>
class InertiaSpec {
 public:
  InertiaSpec(const Mat3<Scalar>& inertia, Scalar mass) : inertia_(inertia), mass_(mass) {
    if (!inertia.allFinite() || !std::isfinite(static_cast<double>(mass))) {
      throw InvalidInertia("inertia and mass must be finite");
    }
    if ((inertia - inertia.transpose()).cwiseAbs().maxCoeff() > Scalar(kInertiaSymmetryTolerance)) {
      throw InvalidInertia("inertia tensor is not symmetric");
    }
    if (!(mass > Scalar(0))) throw InvalidInertia("mass must be positive");
    Eigen::SelfAdjointEigenSolver<Mat3<Scalar>> eig(inertia);
    if (eig.info() != Eigen::Success || !(eig.eigenvalues().minCoeff() > Scalar(0))) {
      throw InvalidInertia("inertia tensor is not positive definite");
    }
    axes_ = eig.eigenvectors();
    principal_ = eig.eigenvalues();
  }

  /// Builds the tensor from its upper triangle (Ixx Ixy Ixz Iyy Iyz Izz).
  static InertiaSpec from_upper(const Eigen::Matrix<Scalar, 6, 1>& u, Scalar mass) {
    Mat3<Scalar> m;
    m << u(0), u(1), u(2),
         u(1), u(3), u(4),
         u(2), u(4), u(5);
    return InertiaSpec(m, mass);
  }

  const Mat3<Scalar>& inertia() const { return inertia_; }
  Scalar mass() const { return mass_; }
  const Vec3<Scalar>& principal_moments() const { return principal_; }

  Vec3<Scalar> apply(const Vec3<Scalar>& w) const { return inertia_ * w; }

  Vec3<Scalar> solve(const Vec3<Scalar>& m) const {
    return axes_ * (axes_.transpose() * m).cwiseQuotient(principal_);
  }

 private:
  Mat3<Scalar> inertia_;
  Mat3<Scalar> axes_;
  Vec3<Scalar> principal_;
  Scalar mass_;
};

template <typename Scalar>
struct RigidBodyState {
  GroupElementSE3<Scalar> group;
  AlgebraElementSE3<Scalar> algebra;
  Scalar time = Scalar(0);
};

template <typename Scalar>
struct RigidBodyTrajectory {
  std::vector<RigidBodyState<Scalar>> states;
  Scalar step = Scalar(0);
};

template <typename Scalar>
struct RigidBodyDiagnostics {
  Scalar time;
  Scalar energy;
  Scalar casimir;
  Vec3<Scalar> spatial_momentum;
};

/// l(omega, v) = 1/2 omega.I omega + m/2 |v|^2
template <typename Scalar>
Scalar reduced_lagrangian(const InertiaSpec<Scalar>& spec, const AlgebraElementSE3<Scalar>& xi) {
  return Scalar(0.5) * xi.ang.dot(spec.apply(xi.ang)) + Scalar(0.5) * spec.mass() * xi.lin.squaredNorm();
}

/// Dl(omega, v) = (I omega, m v)
template <typename Scalar>
CoAlgebraElementSE3<Scalar> legendre(const InertiaSpec<Scalar>& spec, const AlgebraElementSE3<Scalar>& xi) {
  return {spec.apply(xi.ang), spec.mass() * xi.lin};
}

/// xi' = (I^{-1}(I omega x omega), v x omega)
template <typename Scalar>
AlgebraElementSE3<Scalar> ep_rhs(const InertiaSpec<Scalar>& spec, const AlgebraElementSE3<Scalar>& xi) {
  return {spec.solve(spec.apply(xi.ang).cross(xi.ang)), xi.lin.cross(xi.ang)};
}

namespace detail {

// Left-trivialized inverse dexp, truncated after the second bracket: the
// RKMK4 stage derivative for R = R_n exp(hat(theta)) with R' = R hat(omega).
template <typename Scalar>
Vec3<Scalar> dexpinv_left(const Vec3<Scalar>& theta, const Vec3<Scalar>& omega) {
  const Vec3<Scalar> c = theta.cross(omega);
  return omega + Scalar(0.5) * c + theta.cross(c) / Scalar(12);
}

}  // namespace detail

template <typename Scalar>
RigidBodyState<Scalar> step(const InertiaSpec<Scalar>& spec, const RigidBodyState<Scalar>& s, Scalar dt) {
  if (!(dt > Scalar(0)) || !std::isfinite(static_cast<double>(dt))) {
    throw InvalidStep("rigid body step requires dt > 0");
  }
  const Mat3<Scalar>& r0 = s.group.rot;
  const AlgebraElementSE3<Scalar>& xi0 = s.algebra;
  const Scalar half = dt / Scalar(2);

  // stage 1
  const AlgebraElementSE3<Scalar> k1 = ep_rhs(spec, xi0);
  const Vec3<Scalar> q1 = xi0.ang;
  const Vec3<Scalar> p1 = r0 * xi0.lin;

  // stage 2
  const Vec3<Scalar> th2 = half * q1;
  const AlgebraElementSE3<Scalar> xi2 = xi0 + half * k1;
  const Mat3<Scalar> r2 = r0 * exp_so3(th2);
  const AlgebraElementSE3<Scalar> k2 = ep_rhs(spec, xi2);
  const Vec3<Scalar> q2 = detail::dexpinv_left(th2, xi2.ang);
  const Vec3<Scalar> p2 = r2 * xi2.lin;

  // stage 3
  const Vec3<Scalar> th3 = half * q2;
  const AlgebraElementSE3<Scalar> xi3 = xi0 + half * k2;
  const Mat3<Scalar> r3 = r0 * exp_so3(th3);
  const AlgebraElementSE3<Scalar> k3 = ep_rhs(spec, xi3);
  const Vec3<Scalar> q3 = detail::dexpinv_left(th3, xi3.ang);
  const Vec3<Scalar> p3 = r3 * xi3.lin;

  // stage 4
  const Vec3<Scalar> th4 = dt * q3;
  const AlgebraElementSE3<Scalar> xi4 = xi0 + dt * k3;
  const Mat3<Scalar> r4 = r0 * exp_so3(th4);
  const AlgebraElementSE3<Scalar> k4 = ep_rhs(spec, xi4);
  const Vec3<Scalar> q4 = detail::dexpinv_left(th4, xi4.ang);
  const Vec3<Scalar> p4 = r4 * xi4.lin;

  const Scalar sixth = dt / Scalar(6);
  RigidBodyState<Scalar> out;
  out.algebra = xi0 + sixth * (k1 + Scalar(2) * k2 + Scalar(2) * k3 + k4);
  out.group.rot = r0 * exp_so3(Vec3<Scalar>(sixth * (q1 + Scalar(2) * q2 + Scalar(2) * q3 + q4)));
  out.group.trans = s.group.trans + sixth * (p1 + Scalar(2) * p2 + Scalar(2) * p3 + p4);
  out.time = s.time + dt;
  return out;
}

template <typename Scalar>
RigidBodyTrajectory<Scalar> simulate(const InertiaSpec<Scalar>& spec, const RigidBodyState<Scalar>& s0, Scalar dt,
                                     std::size_t n) {
  if (!(dt > Scalar(0))) throw InvalidStep("rigid body simulate requires dt > 0");
  if (n < 1) throw InvalidStep("rigid body simulate requires at least one step");
  RigidBodyTrajectory<Scalar> traj;
  traj.step = dt;
  traj.states.reserve(n + 1);
  traj.states.push_back(s0);
  for (std::size_t i = 0; i < n; ++i) {
    RigidBodyState<Scalar> next = step(spec, traj.states.back(), dt);
    // times on the uniform grid, not accumulated sums
    next.time = s0.time + static_cast<Scalar>(i + 1) * dt;
    traj.states.push_back(next);
  }
  return traj;
}

template <typename Scalar>
std::vector<RigidBodyDiagnostics<Scalar>> diagnostics(const InertiaSpec<Scalar>& spec,
                                                     const RigidBodyTrajectory<Scalar>& traj) {
  if (traj.states.empty()) throw InvalidStep("diagnostics of an empty trajectory");
  std::vector<RigidBodyDiagnostics<Scalar>> rows;
  rows.reserve(traj.states.size());
  for (const auto& s : traj.states) {
    const Vec3<Scalar> body = spec.apply(s.algebra.ang);
    rows.push_back({s.time, reduced_lagrangian(spec, s.algebra), body.squaredNorm(), s.group.rot * body});
  }
  return rows;
}

}  // namespace geomech
