#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace hipose {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Rigid transform from the model frame to the camera frame: x_cam = R * x_model + t.
/// Translation is in millimeters.
struct Pose {
  Mat3 R = Mat3::Identity();
  Vec3 t = Vec3::Zero();

  static Pose identity() { return {}; }

  Vec3 apply(const Vec3& p) const { return R * p + t; }
  Pose inverse() const { return {R.transpose(), -(R.transpose() * t)}; }
  /// (*this) after `other`: x -> this(other(x)).
  Pose compose(const Pose& other) const { return {R * other.R, R * other.t + t}; }

  /// R^T R = I and det(R) = +1, both within `tol`.
  bool is_valid(double tol = 1e-9) const;
};

/// Geodesic angle (radians) of R_a^T R_b, in [0, pi].
double rotation_distance(const Mat3& a, const Mat3& b);

/// Rotation by `angle` radians about the (normalized) `axis`.
Mat3 axis_angle(const Vec3& axis, double angle);

}  // namespace hipose
