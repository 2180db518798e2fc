#include "hipose/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace hipose {

bool Pose::is_valid(double tol) const {
  if (!R.allFinite() || !t.allFinite()) return false;
  const double ortho = (R.transpose() * R - Mat3::Identity()).cwiseAbs().maxCoeff();
  return ortho <= tol && std::abs(R.determinant() - 1.0) <= tol;
}

double rotation_distance(const Mat3& a, const Mat3& b) {
  const Mat3 rel = a.transpose() * b;
  // The trace formula loses precision near zero; use the antisymmetric part there.
  const double c = std::clamp((rel.trace() - 1.0) * 0.5, -1.0, 1.0);
  const Vec3 axis(rel(2, 1) - rel(1, 2), rel(0, 2) - rel(2, 0), rel(1, 0) - rel(0, 1));
  const double s = 0.5 * axis.norm();
  return std::atan2(s, c);
}

Mat3 axis_angle(const Vec3& axis, double angle) {
  return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

}  // namespace hipose
