#pragma once

#include <random>

#include <Eigen/Core>

#include "geomech/liegroup.hpp"

namespace testing {

inline geomech::Vec3d random_vec3(std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  return {n(rng), n(rng), n(rng)};
}

inline geomech::AlgebraSE3 random_algebra(std::mt19937_64& rng) { return {random_vec3(rng), random_vec3(rng)}; }

inline geomech::CoAlgebraSE3 random_coalgebra(std::mt19937_64& rng) { return {random_vec3(rng), random_vec3(rng)}; }

inline geomech::GroupSE3 random_group(std::mt19937_64& rng) {
  return {geomech::exp_so3(random_vec3(rng, 2.0)), random_vec3(rng)};
}

// Homogeneous 4x4 embeddings, used only as oracles.
inline Eigen::Matrix4d homogeneous(const geomech::AlgebraSE3& xi) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  m.topLeftCorner<3, 3>() = geomech::hat3(xi.ang);
  m.topRightCorner<3, 1>() = xi.lin;
  return m;
}

inline Eigen::Matrix4d homogeneous(const geomech::GroupSE3& g) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = g.rot;
  m.topRightCorner<3, 1>() = g.trans;
  return m;
}

inline geomech::AlgebraSE3 from_homogeneous(const Eigen::Matrix4d& m) {
  return {geomech::vee3(Eigen::Matrix3d(m.topLeftCorner<3, 3>())), m.topRightCorner<3, 1>()};
}

inline double distance(const geomech::AlgebraSE3& a, const geomech::AlgebraSE3& b) { return (a - b).norm(); }

}  // namespace testing
