#include "hipose/kabsch.hpp"

#include <Eigen/SVD>
#include <string>

#include "hipose/error.hpp"

namespace hipose {
namespace {
// Second singular value relative to the first below which the problem has no unique rotation.
constexpr double kRankTol = 1e-10;
}  // namespace

Pose kabsch(std::span<const Vec3> model, std::span<const Vec3> camera,
            std::span<const double> weights) {
  if (model.size() != camera.size()) throw InvalidArgument("kabsch: point lists differ in length");
  if (!weights.empty() && weights.size() != model.size()) {
    throw InvalidArgument("kabsch: weight count does not match point count");
  }
  if (model.size() < 3) {
    throw DegenerateError("kabsch needs at least 3 pairs, got " + std::to_string(model.size()));
  }

  const auto w = [&](std::size_t i) { return weights.empty() ? 1.0 : weights[i]; };
  double total = 0.0;
  Vec3 mean_model = Vec3::Zero(), mean_camera = Vec3::Zero();
  for (std::size_t i = 0; i < model.size(); ++i) {
    total += w(i);
    mean_model += w(i) * model[i];
    mean_camera += w(i) * camera[i];
  }
  if (!(total > 0.0)) throw DegenerateError("kabsch: weights sum to zero");
  mean_model /= total;
  mean_camera /= total;

  Mat3 cov = Mat3::Zero();
  for (std::size_t i = 0; i < model.size(); ++i) {
    cov += w(i) * (model[i] - mean_model) * (camera[i] - mean_camera).transpose();
  }

  const Eigen::JacobiSVD<Mat3> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 s = svd.singularValues();
  if (!(s(0) > 0.0) || s(1) <= kRankTol * s(0)) {
    throw DegenerateError("kabsch: degenerate configuration (collinear or coincident points)");
  }
  const Mat3& u = svd.matrixU();
  const Mat3& v = svd.matrixV();
  Mat3 d = Mat3::Identity();
  // Flip the axis of the smallest singular value when the optimum would be a reflection.
  if ((v * u.transpose()).determinant() < 0.0) d(2, 2) = -1.0;

  Pose pose;
  pose.R = v * d * u.transpose();
  pose.t = mean_camera - pose.R * mean_model;
  return pose;
}

double alignment_cost(std::span<const Vec3> model, std::span<const Vec3> camera, const Pose& pose) {
  double cost = 0.0;
  for (std::size_t i = 0; i < model.size(); ++i) {
    cost += (pose.apply(model[i]) - camera[i]).squaredNorm();
  }
  return cost;
}

}  // namespace hipose
