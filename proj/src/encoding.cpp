#include "hipose/encoding.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <string>

#include "hipose/error.hpp"

namespace hipose {
namespace {

constexpr int kMaxLloydIterations = 20;
constexpr double kRelativeMoveTol = 1e-6;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream per (level, prefix) node, so the result does not depend
// on the order in which sub-surfaces are processed.
std::uint64_t node_seed(std::uint64_t seed, int level, std::uint64_t prefix) {
  return splitmix64(seed ^ splitmix64((std::uint64_t(level) << 40) ^ prefix));
}

// Moves `excess` members of `from` whose distance to `target` is smallest
// (ties: lowest vertex id) into `to`.
void transfer_closest(std::span<const Vec3> v, std::vector<std::uint32_t>& from,
                      std::vector<std::uint32_t>& to, const Vec3& target, std::size_t excess) {
  std::vector<std::pair<double, std::uint32_t>> ranked;
  ranked.reserve(from.size());
  for (std::uint32_t id : from) ranked.emplace_back((v[id] - target).squaredNorm(), id);
  std::sort(ranked.begin(), ranked.end());
  std::vector<std::uint32_t> keep;
  keep.reserve(from.size() - excess);
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    (k < excess ? to : keep).push_back(ranked[k].second);
  }
  from = std::move(keep);
}

}  // namespace

void balanced_bisect(std::span<const Vec3> v, std::span<std::uint32_t> ids, std::uint64_t seed) {
  const std::size_t n = ids.size();
  if (n < 2) return;
  std::mt19937_64 rng(seed);

  // k-means++ seeding.
  std::vector<std::uint32_t> sorted_ids(ids.begin(), ids.end());
  std::sort(sorted_ids.begin(), sorted_ids.end());
  Vec3 center[2];
  center[0] = v[sorted_ids[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)]];
  std::vector<double> weight(n);
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    weight[k] = (v[sorted_ids[k]] - center[0]).squaredNorm();
    total += weight[k];
  }
  if (total <= 0.0) {
    // All coincident: any balanced split is optimal.
    std::copy(sorted_ids.begin(), sorted_ids.end(), ids.begin());
    return;
  }
  center[1] = v[sorted_ids[std::discrete_distribution<std::size_t>(weight.begin(), weight.end())(rng)]];

  // Lloyd iterations.
  std::vector<std::uint8_t> label(n, 0);
  for (int iter = 0; iter < kMaxLloydIterations; ++iter) {
    Vec3 sum[2] = {Vec3::Zero(), Vec3::Zero()};
    std::size_t count[2] = {0, 0};
    for (std::size_t k = 0; k < n; ++k) {
      const Vec3& p = v[sorted_ids[k]];
      label[k] = (p - center[1]).squaredNorm() < (p - center[0]).squaredNorm() ? 1 : 0;
      sum[label[k]] += p;
      ++count[label[k]];
    }
    double moved = 0.0;
    for (int c = 0; c < 2; ++c) {
      if (count[c] == 0) continue;
      const Vec3 next = sum[c] / static_cast<double>(count[c]);
      moved = std::max(moved, (next - center[c]).norm());
      center[c] = next;
    }
    const double spread = (center[0] - center[1]).norm();
    if (moved <= kRelativeMoveTol * std::max(spread, 1e-300)) break;
  }

  // Final assignment against the converged centers, then rebalance to floor(L/2) / ceil(L/2).
  std::vector<std::uint32_t> part[2];
  for (std::size_t k = 0; k < n; ++k) {
    const Vec3& p = v[sorted_ids[k]];
    part[(p - center[1]).squaredNorm() < (p - center[0]).squaredNorm() ? 1 : 0].push_back(sorted_ids[k]);
  }
  const std::size_t want0 = n / 2;
  if (part[0].size() > want0) {
    transfer_closest(v, part[0], part[1], center[1], part[0].size() - want0);
  } else if (part[0].size() < want0) {
    transfer_closest(v, part[1], part[0], center[0], want0 - part[0].size());
  }
  std::sort(part[0].begin(), part[0].end());
  std::sort(part[1].begin(), part[1].end());
  std::copy(part[0].begin(), part[0].end(), ids.begin());
  std::copy(part[1].begin(), part[1].end(), ids.begin() + static_cast<std::ptrdiff_t>(want0));
}

SurfaceEncoding build_encoding(std::span<const Vec3> vertices, int bits, std::uint64_t seed) {
  if (bits < 1 || bits > kMaxEncodingBits) {
    throw InvalidArgument("bit depth must be in [1, " + std::to_string(kMaxEncodingBits) + "]");
  }
  const std::size_t n = std::size_t{1} << bits;
  if (vertices.size() != n) {
    throw InvalidArgument("encoding needs exactly 2^" + std::to_string(bits) + " = " +
                          std::to_string(n) + " vertices, got " + std::to_string(vertices.size()));
  }
  for (const Vec3& p : vertices) {
    if (!p.allFinite()) throw InvalidArgument("non-finite vertex");
  }

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  for (int level = 0; level < bits; ++level) {
    const std::size_t span_len = n >> level;
    for (std::size_t prefix = 0; prefix < (std::size_t{1} << level); ++prefix) {
      balanced_bisect(vertices, std::span(order).subspan(prefix * span_len, span_len),
                      node_seed(seed, level, prefix));
    }
  }
  std::vector<std::uint32_t> codes(n);
  for (std::size_t pos = 0; pos < n; ++pos) codes[order[pos]] = static_cast<std::uint32_t>(pos);
  return SurfaceEncoding::from_codes(std::vector<Vec3>(vertices.begin(), vertices.end()),
                                     std::move(codes), bits);
}

SurfaceEncoding build_encoding(const TriangleMesh& mesh, int bits, std::uint64_t seed) {
  return build_encoding(std::span<const Vec3>(mesh.vertices()), bits, seed);
}

SurfaceEncoding SurfaceEncoding::from_codes(std::vector<Vec3> vertices,
                                            std::vector<std::uint32_t> codes, int bits) {
  if (bits < 1 || bits > kMaxEncodingBits) throw FormatError("bit depth out of range");
  const std::size_t n = std::size_t{1} << bits;
  if (vertices.size() != n || codes.size() != n) {
    throw FormatError("encoding with d = " + std::to_string(bits) + " needs " + std::to_string(n) +
                      " vertices and codes, got " + std::to_string(vertices.size()) + " / " +
                      std::to_string(codes.size()));
  }
  SurfaceEncoding enc;
  enc.bits_ = bits;
  enc.by_code_.assign(n, UINT32_MAX);
  for (std::size_t v = 0; v < n; ++v) {
    const std::uint32_t c = codes[v];
    if (c >= n || enc.by_code_[c] != UINT32_MAX) throw FormatError("codes are not a bijection");
    enc.by_code_[c] = static_cast<std::uint32_t>(v);
  }
  enc.vertices_ = std::move(vertices);
  enc.codes_ = std::move(codes);

  enc.xs_.resize(n);
  enc.ys_.resize(n);
  enc.zs_.resize(n);
  for (std::size_t c = 0; c < n; ++c) {
    const Vec3& p = enc.vertices_[enc.by_code_[c]];
    enc.xs_[c] = p.x();
    enc.ys_[c] = p.y();
    enc.zs_[c] = p.z();
  }

  // Each centroid is the plain mean of its members in code order.
  enc.centroids_.resize(2 * n - 1);
  for (int level = 0; level <= bits; ++level) {
    const std::size_t len = n >> level;
    for (std::size_t prefix = 0; prefix < (std::size_t{1} << level); ++prefix) {
      Vec3 sum = Vec3::Zero();
      for (std::size_t c = prefix * len; c < (prefix + 1) * len; ++c) {
        sum += Vec3(enc.xs_[c], enc.ys_[c], enc.zs_[c]);
      }
      enc.centroids_[(std::size_t{1} << level) - 1 + prefix] = sum / static_cast<double>(len);
    }
  }
  return enc;
}

SurfaceEncoding::Surface SurfaceEncoding::surface(int level, std::uint32_t prefix) const {
  const std::uint32_t len = std::uint32_t{1} << (bits_ - level);
  return {prefix * len, len, centroid(level, prefix)};
}

kernels::PointsView SurfaceEncoding::surface_points(int level, std::uint32_t prefix) const {
  const std::size_t len = std::size_t{1} << (bits_ - level);
  return code_ordered_points().subview(prefix * len, len);
}

bool SurfaceEncoding::operator==(const SurfaceEncoding& other) const {
  return bits_ == other.bits_ && codes_ == other.codes_ && vertices_ == other.vertices_;
}

SurfaceLookup surface_lookup(const SurfaceEncoding& enc, std::string_view prefix) {
  if (prefix.size() > static_cast<std::size_t>(enc.bits())) {
    throw InvalidArgument("prefix of length " + std::to_string(prefix.size()) +
                          " exceeds bit depth " + std::to_string(enc.bits()));
  }
  std::uint32_t value = 0;
  for (char ch : prefix) {
    if (ch != '0' && ch != '1') throw InvalidArgument("prefix must contain only '0' and '1'");
    value = (value << 1) | static_cast<std::uint32_t>(ch - '0');
  }
  const int level = static_cast<int>(prefix.size());
  const auto s = enc.surface(level, value);
  SurfaceLookup out{{}, s.centroid};
  out.vertex_ids.reserve(s.count);
  for (std::uint32_t c = s.first; c < s.first + s.count; ++c) out.vertex_ids.push_back(enc.vertex_of(c));
  std::sort(out.vertex_ids.begin(), out.vertex_ids.end());
  return out;
}

}  // namespace hipose
