#include <immintrin.h>

#include <cmath>
#include <limits>

#include "hipose/kernels.hpp"

namespace hipose::kernels::avx2 {
namespace {

// Broadcast rotation/translation once per call.
struct Broadcast {
  __m256d r[9];
  __m256d t[3];

  explicit Broadcast(const Rigid& pose) {
    for (int i = 0; i < 9; ++i) r[i] = _mm256_set1_pd(pose.r[i]);
    for (int i = 0; i < 3; ++i) t[i] = _mm256_set1_pd(pose.t[i]);
  }

  // Same association as posed_coord(); no FMA so lanes match the scalar path.
  __m256d coord(int row, __m256d x, __m256d y, __m256d z) const {
    __m256d acc = _mm256_add_pd(_mm256_mul_pd(r[3 * row], x), _mm256_mul_pd(r[3 * row + 1], y));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(r[3 * row + 2], z));
    return _mm256_add_pd(acc, t[row]);
  }
};

inline __m256d sq_norm(__m256d dx, __m256d dy, __m256d dz) {
  return _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)),
                       _mm256_mul_pd(dz, dz));
}

// Local helpers instead of std::min/std::max: this file is built with -mavx2 and
// must not emit AVX2 copies of inline functions shared with the rest of the program.
inline double min2(double a, double b) { return b < a ? b : a; }
inline double max2(double a, double b) { return b > a ? b : a; }

inline double hmin(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return min2(min2(lanes[0], lanes[1]), min2(lanes[2], lanes[3]));
}

inline double hmax(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return max2(max2(lanes[0], lanes[1]), max2(lanes[2], lanes[3]));
}

}  // namespace

double min_sq_distance_posed(PointsView verts, const Rigid& pose, const double p[3]) {
  const Broadcast b(pose);
  const __m256d px = _mm256_set1_pd(p[0]);
  const __m256d py = _mm256_set1_pd(p[1]);
  const __m256d pz = _mm256_set1_pd(p[2]);
  __m256d best = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + 4 <= verts.n; i += 4) {
    const __m256d x = _mm256_loadu_pd(verts.x + i);
    const __m256d y = _mm256_loadu_pd(verts.y + i);
    const __m256d z = _mm256_loadu_pd(verts.z + i);
    const __m256d dx = _mm256_sub_pd(b.coord(0, x, y, z), px);
    const __m256d dy = _mm256_sub_pd(b.coord(1, x, y, z), py);
    const __m256d dz = _mm256_sub_pd(b.coord(2, x, y, z), pz);
    best = _mm256_min_pd(best, sq_norm(dx, dy, dz));
  }
  double out = hmin(best);
  if (i < verts.n) {
    out = min2(out, scalar::min_sq_distance_posed(verts.subview(i, verts.n - i), pose, p));
  }
  return out;
}

std::size_t count_within_posed(PointsView model, PointsView camera, const Rigid& pose,
                               double max_sq) {
  const Broadcast b(pose);
  const __m256d limit = _mm256_set1_pd(max_sq);
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 4 <= model.n; i += 4) {
    const __m256d x = _mm256_loadu_pd(model.x + i);
    const __m256d y = _mm256_loadu_pd(model.y + i);
    const __m256d z = _mm256_loadu_pd(model.z + i);
    const __m256d dx = _mm256_sub_pd(b.coord(0, x, y, z), _mm256_loadu_pd(camera.x + i));
    const __m256d dy = _mm256_sub_pd(b.coord(1, x, y, z), _mm256_loadu_pd(camera.y + i));
    const __m256d dz = _mm256_sub_pd(b.coord(2, x, y, z), _mm256_loadu_pd(camera.z + i));
    const int mask = _mm256_movemask_pd(_mm256_cmp_pd(sq_norm(dx, dy, dz), limit, _CMP_LE_OQ));
    count += static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(mask)));
  }
  if (i < model.n) {
    count += scalar::count_within_posed(model.subview(i, model.n - i),
                                        camera.subview(i, camera.n - i), pose, max_sq);
  }
  return count;
}

double sum_distance_between_poses(PointsView verts, const Rigid& a, const Rigid& b) {
  const Broadcast ba(a);
  const Broadcast bb(b);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= verts.n; i += 4) {
    const __m256d x = _mm256_loadu_pd(verts.x + i);
    const __m256d y = _mm256_loadu_pd(verts.y + i);
    const __m256d z = _mm256_loadu_pd(verts.z + i);
    const __m256d dx = _mm256_sub_pd(ba.coord(0, x, y, z), bb.coord(0, x, y, z));
    const __m256d dy = _mm256_sub_pd(ba.coord(1, x, y, z), bb.coord(1, x, y, z));
    const __m256d dz = _mm256_sub_pd(ba.coord(2, x, y, z), bb.coord(2, x, y, z));
    acc = _mm256_add_pd(acc, _mm256_sqrt_pd(sq_norm(dx, dy, dz)));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double sum = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  if (i < verts.n) sum += scalar::sum_distance_between_poses(verts.subview(i, verts.n - i), a, b);
  return sum;
}

double max_sq_distance(PointsView pts, const double q[3]) {
  const __m256d qx = _mm256_set1_pd(q[0]);
  const __m256d qy = _mm256_set1_pd(q[1]);
  const __m256d qz = _mm256_set1_pd(q[2]);
  __m256d best = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= pts.n; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(pts.x + i), qx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(pts.y + i), qy);
    const __m256d dz = _mm256_sub_pd(_mm256_loadu_pd(pts.z + i), qz);
    best = _mm256_max_pd(best, sq_norm(dx, dy, dz));
  }
  double out = hmax(best);
  if (i < pts.n) out = max2(out, scalar::max_sq_distance(pts.subview(i, pts.n - i), q));
  return out;
}

}  // namespace hipose::kernels::avx2
