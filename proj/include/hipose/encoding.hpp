#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "hipose/geometry.hpp"
#include "hipose/kernels.hpp"
#include "hipose/mesh.hpp"

namespace hipose {

inline constexpr int kMaxEncodingBits = 24;

/// Hierarchical binary surface encoding over N = 2^d vertices.
///
/// Bit 0 is the coarsest split and is stored as the most significant of the d
/// code bits, so the k-bit prefix of a code is `code >> (d - k)`. Vertices are
/// additionally kept sorted by code: the surface named by prefix b at level k is
/// the contiguous code range [b * 2^(d-k), (b + 1) * 2^(d-k)).
///
/// Immutable after construction and safe to share between threads.
class SurfaceEncoding {
 public:
  /// One sub-surface: a run of vertices in code order plus its centroid.
  struct Surface {
    std::uint32_t first = 0;  ///< first code in the run
    std::uint32_t count = 0;
    Vec3 centroid = Vec3::Zero();
  };

  /// Validates that `codes` is a bijection onto [0, 2^bits) and builds all level tables.
  static SurfaceEncoding from_codes(std::vector<Vec3> vertices, std::vector<std::uint32_t> codes,
                                    int bits);

  int bits() const { return bits_; }
  std::size_t size() const { return vertices_.size(); }

  /// Model vertices in their original (mesh) order.
  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<std::uint32_t>& codes() const { return codes_; }
  std::uint32_t code(std::size_t vertex) const { return codes_[vertex]; }
  /// Inverse of code(): vertex id holding `code`.
  std::uint32_t vertex_of(std::uint32_t code) const { return by_code_[code]; }
  const Vec3& vertex_at_code(std::uint32_t code) const { return vertices_[by_code_[code]]; }

  /// Vertex coordinates ordered by code, for the distance kernels.
  kernels::PointsView code_ordered_points() const {
    return {xs_.data(), ys_.data(), zs_.data(), xs_.size()};
  }

  /// Level-k surface for a k-bit prefix (prefix < 2^k). O(1).
  Surface surface(int level, std::uint32_t prefix) const;
  const Vec3& centroid(int level, std::uint32_t prefix) const {
    return centroids_[(std::size_t{1} << level) - 1 + prefix];
  }
  kernels::PointsView surface_points(int level, std::uint32_t prefix) const;
  /// Surface containing `code` at `level`.
  std::uint32_t prefix_of(std::uint32_t code, int level) const {
    return level == 0 ? 0u : code >> (bits_ - level);
  }

  bool operator==(const SurfaceEncoding& other) const;

 private:
  SurfaceEncoding() = default;

  int bits_ = 0;
  std::vector<Vec3> vertices_;
  std::vector<std::uint32_t> codes_;
  std::vector<std::uint32_t> by_code_;
  std::vector<double> xs_, ys_, zs_;
  // Heap layout: level k occupies [2^k - 1, 2^(k+1) - 1).
  std::vector<Vec3> centroids_;
};

/// Result of a prefix query: member vertex ids (ascending) and their centroid.
struct SurfaceLookup {
  std::vector<std::uint32_t> vertex_ids;
  Vec3 centroid;
};

/// `prefix` is a string of '0'/'1' characters of length at most d.
/// Throws InvalidArgument for longer prefixes or other characters.
SurfaceLookup surface_lookup(const SurfaceEncoding& enc, std::string_view prefix);

/// Recursive balanced 2-means bisection of `vertices` (exactly 2^bits of them).
/// Deterministic for a given seed. Throws InvalidArgument if the count is wrong.
SurfaceEncoding build_encoding(std::span<const Vec3> vertices, int bits, std::uint64_t seed);
SurfaceEncoding build_encoding(const TriangleMesh& mesh, int bits, std::uint64_t seed);

/// Splits `ids` in place into floor(L/2) ids for child 0 followed by the rest for
/// child 1. Exposed for testing; build_encoding applies it level by level.
void balanced_bisect(std::span<const Vec3> vertices, std::span<std::uint32_t> ids,
                     std::uint64_t seed);

/// Binary .hsenc file: little-endian header {magic, version, d, N}, f64 vertex
/// coordinates, u16 (d <= 16) or u32 codes, trailing CRC32.
void save_encoding(const SurfaceEncoding& enc, const std::filesystem::path& path);
SurfaceEncoding load_encoding(const std::filesystem::path& path);
std::vector<std::uint8_t> serialize_encoding(const SurfaceEncoding& enc);
SurfaceEncoding deserialize_encoding(std::span<const std::uint8_t> bytes);

}  // namespace hipose
