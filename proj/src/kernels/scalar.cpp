#include <algorithm>
#include <cmath>
#include <limits>

#include "hipose/kernels.hpp"

namespace hipose::kernels {

Rigid Rigid::from(const Pose& pose) {
  Rigid out{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) out.r[3 * i + j] = pose.R(i, j);
    out.t[i] = pose.t[i];
  }
  return out;
}

namespace scalar {

double min_sq_distance_posed(PointsView verts, const Rigid& pose, const double p[3]) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < verts.n; ++i) {
    const double dx = posed_coord(pose.r, pose.t[0], verts.x[i], verts.y[i], verts.z[i]) - p[0];
    const double dy =
        posed_coord(pose.r + 3, pose.t[1], verts.x[i], verts.y[i], verts.z[i]) - p[1];
    const double dz =
        posed_coord(pose.r + 6, pose.t[2], verts.x[i], verts.y[i], verts.z[i]) - p[2];
    best = std::min(best, (dx * dx + dy * dy) + dz * dz);
  }
  return best;
}

std::size_t count_within_posed(PointsView model, PointsView camera, const Rigid& pose,
                               double max_sq) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < model.n; ++i) {
    const double dx =
        posed_coord(pose.r, pose.t[0], model.x[i], model.y[i], model.z[i]) - camera.x[i];
    const double dy =
        posed_coord(pose.r + 3, pose.t[1], model.x[i], model.y[i], model.z[i]) - camera.y[i];
    const double dz =
        posed_coord(pose.r + 6, pose.t[2], model.x[i], model.y[i], model.z[i]) - camera.z[i];
    count += ((dx * dx + dy * dy) + dz * dz) <= max_sq ? 1 : 0;
  }
  return count;
}

double sum_distance_between_poses(PointsView verts, const Rigid& a, const Rigid& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < verts.n; ++i) {
    const double x = verts.x[i], y = verts.y[i], z = verts.z[i];
    const double dx = posed_coord(a.r, a.t[0], x, y, z) - posed_coord(b.r, b.t[0], x, y, z);
    const double dy =
        posed_coord(a.r + 3, a.t[1], x, y, z) - posed_coord(b.r + 3, b.t[1], x, y, z);
    const double dz =
        posed_coord(a.r + 6, a.t[2], x, y, z) - posed_coord(b.r + 6, b.t[2], x, y, z);
    sum += std::sqrt((dx * dx + dy * dy) + dz * dz);
  }
  return sum;
}

double max_sq_distance(PointsView pts, const double q[3]) {
  double best = 0.0;
  for (std::size_t i = 0; i < pts.n; ++i) {
    const double dx = pts.x[i] - q[0];
    const double dy = pts.y[i] - q[1];
    const double dz = pts.z[i] - q[2];
    best = std::max(best, (dx * dx + dy * dy) + dz * dz);
  }
  return best;
}

}  // namespace scalar
}  // namespace hipose::kernels
