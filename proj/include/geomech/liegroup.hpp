#pragma once

// so(3) / se(3) kernel. Elements of se(3) are kept as pairs of 3-vectors
// (angular part, linear part); the 4x4 homogeneous embedding is never formed.

#include <cmath>

#include <Eigen/Dense>

#include "geomech/errors.hpp"

namespace geomech {

template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Mat3 = Eigen::Matrix<Scalar, 3, 3>;

using Vec3d = Vec3<double>;
using Mat3d = Mat3<double>;

/// Maximum |M + M^T| entry accepted by vee3.
inline constexpr double kSkewTolerance = 1e-10;
/// Below this angle exp_so3 switches to Taylor coefficients.
inline constexpr double kSmallAngle = 1e-6;
/// Rotation invariants: |R^T R - I|_F and |det R - 1|.
inline constexpr double kRotationTolerance = 1e-12;

/// (omega, v) in se(3).
template <typename Scalar>
struct AlgebraElementSE3 {
  Vec3<Scalar> ang = Vec3<Scalar>::Zero();
  Vec3<Scalar> lin = Vec3<Scalar>::Zero();

  static AlgebraElementSE3 Zero() { return {}; }

  AlgebraElementSE3& operator+=(const AlgebraElementSE3& o) {
    ang += o.ang;
    lin += o.lin;
    return *this;
  }
  friend AlgebraElementSE3 operator+(AlgebraElementSE3 a, const AlgebraElementSE3& b) { return a += b; }
  friend AlgebraElementSE3 operator-(const AlgebraElementSE3& a, const AlgebraElementSE3& b) {
    return {a.ang - b.ang, a.lin - b.lin};
  }
  friend AlgebraElementSE3 operator*(Scalar s, const AlgebraElementSE3& a) { return {s * a.ang, s * a.lin}; }

  Scalar norm() const { return std::sqrt(ang.squaredNorm() + lin.squaredNorm()); }
};

/// (pi, p) in se(3)^*, paired with se(3) by pi.omega + p.v.
template <typename Scalar>
struct CoAlgebraElementSE3 {
  Vec3<Scalar> angmom = Vec3<Scalar>::Zero();
  Vec3<Scalar> linmom = Vec3<Scalar>::Zero();

  friend CoAlgebraElementSE3 operator-(const CoAlgebraElementSE3& a, const CoAlgebraElementSE3& b) {
    return {a.angmom - b.angmom, a.linmom - b.linmom};
  }

  Scalar norm() const { return std::sqrt(angmom.squaredNorm() + linmom.squaredNorm()); }
};

/// (R, r) in SE(3), acting on points as x -> R x + r.
template <typename Scalar>
struct GroupElementSE3 {
  Mat3<Scalar> rot = Mat3<Scalar>::Identity();
  Vec3<Scalar> trans = Vec3<Scalar>::Zero();

  static GroupElementSE3 Identity() { return {}; }

  GroupElementSE3 inverse() const {
    Mat3<Scalar> rt = rot.transpose();
    return {rt, -(rt * trans)};
  }

  friend GroupElementSE3 operator*(const GroupElementSE3& a, const GroupElementSE3& b) {
    return {a.rot * b.rot, a.rot * b.trans + a.trans};
  }

  bool is_valid() const {
    using std::abs;
    const Scalar orth = (rot.transpose() * rot - Mat3<Scalar>::Identity()).norm();
    return rot.allFinite() && trans.allFinite() && orth <= Scalar(kRotationTolerance) &&
           abs(rot.determinant() - Scalar(1)) <= Scalar(kRotationTolerance);
  }
};

using AlgebraSE3 = AlgebraElementSE3<double>;
using CoAlgebraSE3 = CoAlgebraElementSE3<double>;
using GroupSE3 = GroupElementSE3<double>;

template <typename Derived>
Mat3<typename Derived::Scalar> hat3(const Eigen::MatrixBase<Derived>& w) {
  using Scalar = typename Derived::Scalar;
  Mat3<Scalar> m;
  m << Scalar(0), -w(2), w(1),
       w(2), Scalar(0), -w(0),
       -w(1), w(0), Scalar(0);
  return m;
}

template <typename Derived>
Vec3<typename Derived::Scalar> vee3(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if ((m + m.transpose()).cwiseAbs().maxCoeff() > Scalar(kSkewTolerance)) {
    throw NotSkew("vee3: matrix is not skew-symmetric");
  }
  return Vec3<Scalar>(m(2, 1), m(0, 2), m(1, 0));
}

/// [(w,v),(s,u)] = (w x s, w x u - s x v)
template <typename Scalar>
AlgebraElementSE3<Scalar> bracket(const AlgebraElementSE3<Scalar>& a, const AlgebraElementSE3<Scalar>& b) {
  return {a.ang.cross(b.ang), a.ang.cross(b.lin) - b.ang.cross(a.lin)};
}

/// Coadjoint action ad*_xi mu = (pi x w + p x v, p x w), the dual of bracket(xi, .).
template <typename Scalar>
CoAlgebraElementSE3<Scalar> ad_star(const AlgebraElementSE3<Scalar>& xi, const CoAlgebraElementSE3<Scalar>& mu) {
  return {mu.angmom.cross(xi.ang) + mu.linmom.cross(xi.lin), mu.linmom.cross(xi.ang)};
}

template <typename Scalar>
Scalar pairing(const CoAlgebraElementSE3<Scalar>& mu, const AlgebraElementSE3<Scalar>& xi) {
  return mu.angmom.dot(xi.ang) + mu.linmom.dot(xi.lin);
}

/// Ad_g xi = g xi g^{-1}; for g = (R, r): (R w, r x R w + R v).
template <typename Scalar>
AlgebraElementSE3<Scalar> adjoint(const GroupElementSE3<Scalar>& g, const AlgebraElementSE3<Scalar>& xi) {
  const Vec3<Scalar> rw = g.rot * xi.ang;
  return {rw, g.trans.cross(rw) + g.rot * xi.lin};
}

/// Rodrigues formula R = I + A hat(w) + B hat(w)^2.
template <typename Derived>
Mat3<typename Derived::Scalar> exp_so3(const Eigen::MatrixBase<Derived>& w) {
  using Scalar = typename Derived::Scalar;
  using std::sin;
  using std::sqrt;
  const Scalar theta2 = w.squaredNorm();
  const Scalar theta = sqrt(theta2);
  Scalar a;
  Scalar b;
  if (theta < Scalar(kSmallAngle)) {
    a = Scalar(1) - theta2 / Scalar(6);
    b = Scalar(0.5) - theta2 / Scalar(24);
  } else {
    const Scalar half = sin(theta / Scalar(2)) / theta;
    a = sin(theta) / theta;
    b = Scalar(2) * half * half;
  }
  const Mat3<Scalar> k = hat3(w);
  return Mat3<Scalar>::Identity() + a * k + b * (k * k);
}

}  // namespace geomech
