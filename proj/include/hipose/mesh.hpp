#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "hipose/geometry.hpp"
#include "hipose/kernels.hpp"

namespace hipose {

using Face = std::array<std::uint32_t, 3>;

/// Object model in millimeters. Vertices are kept both as Eigen vectors and as
/// structure-of-arrays columns for the kernels.
class TriangleMesh {
 public:
  /// Validates finiteness, face ranges, vertex count and non-coplanarity, then
  /// caches the diameter. Throws DegenerateError / ParseError.
  TriangleMesh(std::vector<Vec3> vertices, std::vector<Face> faces);

  /// Same validation, but adopts a known diameter instead of recomputing it.
  static TriangleMesh with_diameter(std::vector<Vec3> vertices, std::vector<Face> faces,
                                    double diameter);

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Face>& faces() const { return faces_; }
  std::size_t size() const { return vertices_.size(); }
  /// Maximum pairwise vertex distance.
  double diameter() const { return diameter_; }
  kernels::PointsView points() const { return {xs_.data(), ys_.data(), zs_.data(), xs_.size()}; }

 private:
  TriangleMesh(std::vector<Vec3> vertices, std::vector<Face> faces, double diameter);
  void validate() const;

  std::vector<Vec3> vertices_;
  std::vector<Face> faces_;
  std::vector<double> xs_, ys_, zs_;
  double diameter_ = 0.0;
};

/// Exact maximum pairwise distance. Sorts points by distance from the centroid
/// and prunes pairs whose radii cannot beat the current best.
double compute_diameter(const std::vector<Vec3>& points);

/// ASCII PLY (vertex/face elements) or OBJ (v/f records), chosen by extension.
TriangleMesh load_mesh(const std::filesystem::path& path);
TriangleMesh parse_ply(std::istream& in);
TriangleMesh parse_obj(std::istream& in);
void save_ply(const TriangleMesh& mesh, const std::filesystem::path& path);

/// Grows the vertex set to exactly 2^bits by area-weighted uniform sampling on
/// the faces. Original vertices come first and are unchanged; faces are dropped
/// unless no sampling was needed. Throws InvalidArgument if 2^bits < size().
TriangleMesh upsample_mesh(const TriangleMesh& mesh, int bits, std::uint64_t seed = 0);

/// Axis-aligned box centered at the origin.
TriangleMesh make_box(double sx, double sy, double sz);
/// Icosahedron refined `subdivisions` times and projected onto the sphere.
TriangleMesh make_icosphere(double radius, int subdivisions);

}  // namespace hipose
