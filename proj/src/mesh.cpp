#include "hipose/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <unordered_map>

#include "hipose/error.hpp"

namespace hipose {
namespace {

// Relative volume below which four points count as coplanar.
constexpr double kCoplanarTol = 1e-9;

bool has_affine_span_3d(const std::vector<Vec3>& v) {
  if (v.size() < 4) return false;
  const Vec3& a = v[0];
  std::size_t ib = 0;
  double best = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double d = (v[i] - a).squaredNorm();
    if (d > best) best = d, ib = i;
  }
  if (best == 0.0) return false;
  const double scale = std::sqrt(best);
  const Vec3 ab = v[ib] - a;
  std::size_t ic = 0;
  best = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double d = ab.cross(v[i] - a).squaredNorm();
    if (d > best) best = d, ic = i;
  }
  if (std::sqrt(best) <= kCoplanarTol * scale * scale) return false;
  const Vec3 normal = ab.cross(v[ic] - a);
  double vol = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) vol = std::max(vol, std::abs(normal.dot(v[i] - a)));
  return vol > kCoplanarTol * scale * scale * scale;
}

}  // namespace

TriangleMesh::TriangleMesh(std::vector<Vec3> vertices, std::vector<Face> faces)
    : TriangleMesh(std::move(vertices), std::move(faces), -1.0) {}

TriangleMesh::TriangleMesh(std::vector<Vec3> vertices, std::vector<Face> faces, double diameter)
    : vertices_(std::move(vertices)), faces_(std::move(faces)) {
  validate();
  xs_.reserve(vertices_.size());
  ys_.reserve(vertices_.size());
  zs_.reserve(vertices_.size());
  for (const Vec3& p : vertices_) {
    xs_.push_back(p.x());
    ys_.push_back(p.y());
    zs_.push_back(p.z());
  }
  diameter_ = diameter >= 0.0 ? diameter : compute_diameter(vertices_);
  if (!(diameter_ > 0.0)) throw DegenerateError("mesh has zero diameter");
}

TriangleMesh TriangleMesh::with_diameter(std::vector<Vec3> vertices, std::vector<Face> faces,
                                         double diameter) {
  if (!(diameter > 0.0)) throw DegenerateError("mesh has zero diameter");
  return TriangleMesh(std::move(vertices), std::move(faces), diameter);
}

void TriangleMesh::validate() const {
  for (const Vec3& p : vertices_) {
    if (!p.allFinite()) throw ParseError("non-finite vertex coordinate");
  }
  for (const Face& f : faces_) {
    for (std::uint32_t idx : f) {
      if (idx >= vertices_.size()) {
        throw ParseError("face index " + std::to_string(idx) + " out of range for " +
                         std::to_string(vertices_.size()) + " vertices");
      }
    }
  }
  if (vertices_.size() < 4) {
    throw DegenerateError("mesh needs at least 4 vertices, got " +
                          std::to_string(vertices_.size()));
  }
  if (!has_affine_span_3d(vertices_)) throw DegenerateError("mesh vertices are coplanar");
}

double compute_diameter(const std::vector<Vec3>& points) {
  if (points.size() < 2) return 0.0;
  Vec3 center = Vec3::Zero();
  for (const Vec3& p : points) center += p;
  center /= static_cast<double>(points.size());

  std::vector<std::pair<double, std::size_t>> by_radius(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    by_radius[i] = {(points[i] - center).norm(), i};
  }
  std::sort(by_radius.begin(), by_radius.end(),
            [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });

  std::vector<double> xs(points.size()), ys(points.size()), zs(points.size());
  for (std::size_t k = 0; k < by_radius.size(); ++k) {
    const Vec3& p = points[by_radius[k].second];
    xs[k] = p.x();
    ys[k] = p.y();
    zs[k] = p.z();
  }
  const kernels::PointsView all{xs.data(), ys.data(), zs.data(), xs.size()};
  const double r_max = by_radius.front().first;
  double best_sq = 0.0;
  for (std::size_t k = 0; k + 1 < by_radius.size(); ++k) {
    const double bound = by_radius[k].first + r_max;
    // Any pair involving k or a later point is bounded by r_k + r_max.
    if (bound * bound <= best_sq) break;
    const double q[3] = {xs[k], ys[k], zs[k]};
    best_sq = std::max(best_sq, kernels::max_sq_distance(all.subview(k + 1, all.n - k - 1), q));
  }
  return std::sqrt(best_sq);
}

TriangleMesh upsample_mesh(const TriangleMesh& mesh, int bits, std::uint64_t seed) {
  if (bits < 1 || bits > 30) throw InvalidArgument("bit depth must be in [1, 30]");
  const std::size_t target = std::size_t{1} << bits;
  if (target < mesh.size()) {
    throw InvalidArgument("2^" + std::to_string(bits) + " = " + std::to_string(target) +
                          " is smaller than the mesh's " + std::to_string(mesh.size()) +
                          " vertices");
  }
  if (target == mesh.size()) return mesh;
  if (mesh.faces().empty()) throw InvalidArgument("cannot upsample a mesh without faces");

  const auto& v = mesh.vertices();
  std::vector<double> areas;
  areas.reserve(mesh.faces().size());
  for (const Face& f : mesh.faces()) {
    areas.push_back(0.5 * (v[f[1]] - v[f[0]]).cross(v[f[2]] - v[f[0]]).norm());
  }
  if (std::accumulate(areas.begin(), areas.end(), 0.0) <= 0.0) {
    throw DegenerateError("mesh faces have zero total area");
  }

  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::discrete_distribution<std::size_t> pick_face(areas.begin(), areas.end());
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<Vec3> out = v;
  out.reserve(target);
  while (out.size() < target) {
    const Face& f = mesh.faces()[pick_face(rng)];
    const double r1 = std::sqrt(unit(rng));
    const double r2 = unit(rng);
    out.push_back((1.0 - r1) * v[f[0]] + (r1 * (1.0 - r2)) * v[f[1]] + (r1 * r2) * v[f[2]]);
  }
  // Samples stay inside the convex hull of the originals, so the diameter is unchanged.
  return TriangleMesh::with_diameter(std::move(out), {}, mesh.diameter());
}

TriangleMesh make_box(double sx, double sy, double sz) {
  const double hx = 0.5 * sx, hy = 0.5 * sy, hz = 0.5 * sz;
  std::vector<Vec3> v;
  for (int i = 0; i < 8; ++i) {
    v.emplace_back((i & 1) ? hx : -hx, (i & 2) ? hy : -hy, (i & 4) ? hz : -hz);
  }
  // Outward-facing triangles, two per side.
  std::vector<Face> f = {
      {0, 2, 1}, {1, 2, 3}, {4, 5, 6}, {5, 7, 6},  // -z, +z
      {0, 1, 4}, {1, 5, 4}, {2, 6, 3}, {3, 6, 7},  // -y, +y
      {0, 4, 2}, {2, 4, 6}, {1, 3, 5}, {3, 7, 5},  // -x, +x
  };
  return TriangleMesh(std::move(v), std::move(f));
}

TriangleMesh make_icosphere(double radius, int subdivisions) {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {
      {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
      {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
      {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1},
  };
  std::vector<Face> f = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1},
  };
  for (Vec3& p : v) p.normalize();
  for (int s = 0; s < subdivisions; ++s) {
    std::unordered_map<std::uint64_t, std::uint32_t> midpoint;
    auto mid = [&](std::uint32_t a, std::uint32_t b) {
      const std::uint64_t key = (std::uint64_t{std::min(a, b)} << 32) | std::max(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      v.push_back((v[a] + v[b]).normalized());
      const auto idx = static_cast<std::uint32_t>(v.size() - 1);
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<Face> next;
    next.reserve(f.size() * 4);
    for (const Face& t : f) {
      const std::uint32_t ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
      next.push_back({t[0], ab, ca});
      next.push_back({t[1], bc, ab});
      next.push_back({t[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    f = std::move(next);
  }
  for (Vec3& p : v) p *= radius;
  return TriangleMesh(std::move(v), std::move(f));
}

}  // namespace hipose
