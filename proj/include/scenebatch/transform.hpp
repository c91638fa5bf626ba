#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <vector>

namespace scenebatch {

using Mat4 = Eigen::Matrix4d;
using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;
using Quat = Eigen::Quaterniond;

// One 4x4 homogeneous transform per scene instance.
struct TransformBatch {
  std::vector<Mat4> data;

  TransformBatch() = default;
  explicit TransformBatch(std::size_t n) : data(n, Mat4::Identity()) {}
  TransformBatch(std::size_t n, const Mat4& m) : data(n, m) {}

  std::size_t size() const { return data.size(); }
  Mat4& operator[](std::size_t i) { return data[i]; }
  const Mat4& operator[](std::size_t i) const { return data[i]; }
};

// Bottom row must be (0,0,0,1) exactly.
inline bool is_homogeneous(const Mat4& m) {
  return m(3, 0) == 0.0 && m(3, 1) == 0.0 && m(3, 2) == 0.0 && m(3, 3) == 1.0;
}

// |R^T R - I|_inf <= tol
inline bool has_orthonormal_rotation(const Mat4& m, double tol = 1e-6) {
  Eigen::Matrix3d r = m.block<3, 3>(0, 0);
  Eigen::Matrix3d err = r.transpose() * r - Eigen::Matrix3d::Identity();
  return err.cwiseAbs().maxCoeff() <= tol;
}

inline Mat4 translation(const Vec3& t) {
  Mat4 m = Mat4::Identity();
  m.block<3, 1>(0, 3) = t;
  return m;
}

inline Mat4 rotation_z(double yaw) {
  Mat4 m = Mat4::Identity();
  double c = std::cos(yaw), s = std::sin(yaw);
  m(0, 0) = c;
  m(0, 1) = -s;
  m(1, 0) = s;
  m(1, 1) = c;
  return m;
}

inline Mat4 rigid(const Vec3& t, const Eigen::Matrix3d& r) {
  Mat4 m = Mat4::Identity();
  m.block<3, 3>(0, 0) = r;
  m.block<3, 1>(0, 3) = t;
  return m;
}

inline Mat4 inverse_rigid(const Mat4& m) {
  Eigen::Matrix3d rt = m.block<3, 3>(0, 0).transpose();
  Mat4 out = Mat4::Identity();
  out.block<3, 3>(0, 0) = rt;
  out.block<3, 1>(0, 3) = -rt * m.block<3, 1>(0, 3);
  return out;
}

inline Vec3 transform_point(const Mat4& m, const Vec3& p) {
  return m.block<3, 3>(0, 0) * p + m.block<3, 1>(0, 3);
}

// Rotation about world z extracted from the upper-left block. Well defined
// for upright poses (the only ones this engine produces).
inline double yaw_of(const Mat4& m) { return std::atan2(m(1, 0), m(0, 0)); }

}  // namespace scenebatch
