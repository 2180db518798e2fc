#pragma once

#include <span>

#include "hipose/geometry.hpp"

namespace hipose {

/// Least-squares rigid alignment (Umeyama without scale): the pose minimizing
/// sum_i w_i |R model_i + t - camera_i|^2, with det(R) = +1 enforced.
///
/// `weights` may be empty (all ones). Throws InvalidArgument on size mismatch
/// and DegenerateError when fewer than three pairs are given or the
/// cross-covariance has rank < 2 (collinear or coincident points).
Pose kabsch(std::span<const Vec3> model, std::span<const Vec3> camera,
            std::span<const double> weights = {});

/// sum_i |R model_i + t - camera_i|^2.
double alignment_cost(std::span<const Vec3> model, std::span<const Vec3> camera, const Pose& pose);

}  // namespace hipose
