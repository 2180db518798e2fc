#pragma once

// Data-parallel inner loops of the solver and the metrics.
//
// Every kernel has a portable scalar reference in `kernels::scalar` and, on
// x86-64, an AVX2 variant in `kernels::avx2`. The public entry points forward
// to whichever table `active_isa()` names; the choice is made once from CPUID
// and can be pinned with HIPOSE_SIMD=scalar|avx2 or `force_isa`.
//
// min_sq_distance_posed, count_within_posed and max_sq_distance evaluate each
// element with the same operation order in every variant, so their results
// are bit-identical across ISAs. sum_distance_between_poses reorders the
// reduction and agrees only to rounding.

#include <cstddef>
#include <span>
#include <string_view>

#include "hipose/geometry.hpp"

namespace hipose::kernels {

/// Structure-of-arrays view over n 3D points.
struct PointsView {
  const double* x = nullptr;
  const double* y = nullptr;
  const double* z = nullptr;
  std::size_t n = 0;

  PointsView subview(std::size_t offset, std::size_t count) const {
    return {x + offset, y + offset, z + offset, count};
  }
};

/// Row-major rotation followed by translation, laid out for the kernels.
struct Rigid {
  double r[9];
  double t[3];

  static Rigid from(const Pose& pose);
};

/// Per-point posed coordinate, in the fixed evaluation order shared by all kernels:
/// ((r0*x + r1*y) + r2*z) + t0.
inline double posed_coord(const double* row, double t, double x, double y, double z) {
  return ((row[0] * x + row[1] * y) + row[2] * z) + t;
}

/// min_i |T v_i - p|^2 over the n points of `verts`. Requires n > 0.
using MinSqDistanceFn = double (*)(PointsView verts, const Rigid& pose, const double p[3]);
/// Number of i with |T m_i - c_i|^2 <= max_sq. `model` and `camera` have equal n.
using CountWithinFn = std::size_t (*)(PointsView model, PointsView camera, const Rigid& pose,
                                      double max_sq);
/// sum_i |A v_i - B v_i|.
using SumPoseDistanceFn = double (*)(PointsView verts, const Rigid& a, const Rigid& b);
/// max_i |v_i - q|^2. Returns 0 for an empty view.
using MaxSqDistanceFn = double (*)(PointsView pts, const double q[3]);

struct KernelTable {
  MinSqDistanceFn min_sq_distance_posed;
  CountWithinFn count_within_posed;
  SumPoseDistanceFn sum_distance_between_poses;
  MaxSqDistanceFn max_sq_distance;
};

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);
/// True when the variant was compiled in and the CPU supports it.
bool isa_available(Isa isa);
/// Table for a specific variant; falls back to scalar when unavailable.
const KernelTable& table(Isa isa);

Isa active_isa();
/// Pin the dispatch target (tests and benchmarks). Unavailable targets are ignored.
void force_isa(Isa isa);

namespace scalar {
double min_sq_distance_posed(PointsView verts, const Rigid& pose, const double p[3]);
std::size_t count_within_posed(PointsView model, PointsView camera, const Rigid& pose,
                               double max_sq);
double sum_distance_between_poses(PointsView verts, const Rigid& a, const Rigid& b);
double max_sq_distance(PointsView pts, const double q[3]);
}  // namespace scalar

namespace avx2 {
double min_sq_distance_posed(PointsView verts, const Rigid& pose, const double p[3]);
std::size_t count_within_posed(PointsView model, PointsView camera, const Rigid& pose,
                               double max_sq);
double sum_distance_between_poses(PointsView verts, const Rigid& a, const Rigid& b);
double max_sq_distance(PointsView pts, const double q[3]);
}  // namespace avx2

// Dispatched entry points.
double min_sq_distance_posed(PointsView verts, const Rigid& pose, const double p[3]);
std::size_t count_within_posed(PointsView model, PointsView camera, const Rigid& pose,
                               double max_sq);
double sum_distance_between_poses(PointsView verts, const Rigid& a, const Rigid& b);
double max_sq_distance(PointsView pts, const double q[3]);

}  // namespace hipose::kernels
