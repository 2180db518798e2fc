#include <gtest/gtest.h>

#include <fstream>
#include <numeric>
#include <set>

#include "hipose/encoding.hpp"
#include "hipose/error.hpp"
#include "test_util.hpp"

using namespace hipose;

namespace {

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::string bits_of(std::uint32_t prefix, int len) {
  std::string s;
  for (int k = len - 1; k >= 0; --k) s.push_back((prefix >> k) & 1u ? '1' : '0');
  return s;
}

// Exhaustive invariant check: bijection, prefix partition, balance, centroids.
int count_violations(const SurfaceEncoding& enc) {
  int bad = 0;
  const int d = enc.bits();
  const std::size_t n = enc.size();
  if (n != (std::size_t{1} << d)) ++bad;
  std::vector<bool> seen(n, false);
  for (std::size_t v = 0; v < n; ++v) {
    const auto c = enc.code(v);
    if (c >= n || seen[c]) {
      ++bad;
      continue;
    }
    seen[c] = true;
    if (enc.vertex_of(c) != v) ++bad;
  }
  for (int k = 0; k <= d; ++k) {
    for (std::uint32_t b = 0; b < (1u << k); ++b) {
      const auto lk = surface_lookup(enc, bits_of(b, k));
      Vec3 mean = Vec3::Zero();
      for (auto id : lk.vertex_ids) mean += enc.vertices()[id];
      mean /= static_cast<double>(lk.vertex_ids.size());
      if ((mean - lk.centroid).norm() > 1e-9 * (1.0 + mean.norm())) ++bad;
      if (k == d) continue;
      const auto c0 = surface_lookup(enc, bits_of(b, k) + "0");
      const auto c1 = surface_lookup(enc, bits_of(b, k) + "1");
      const std::size_t L = lk.vertex_ids.size();
      if (c0.vertex_ids.size() != L / 2 || c1.vertex_ids.size() != L - L / 2) ++bad;
      std::vector<std::uint32_t> uni;
      std::set_union(c0.vertex_ids.begin(), c0.vertex_ids.end(), c1.vertex_ids.begin(),
                     c1.vertex_ids.end(), std::back_inserter(uni));
      if (uni != lk.vertex_ids) ++bad;
    }
  }
  return bad;
}

}  // namespace

TEST(BuildEncoding, TwoCollinearPoints) {
  const std::vector<Vec3> pts{Vec3(0, 0, 0), Vec3(1, 0, 0)};
  const SurfaceEncoding enc = build_encoding(pts, 1, 0);
  std::set<std::uint32_t> codes(enc.codes().begin(), enc.codes().end());
  EXPECT_EQ(codes, (std::set<std::uint32_t>{0, 1}));
  EXPECT_EQ(surface_lookup(enc, "0").vertex_ids.size(), 1u);
  EXPECT_EQ(surface_lookup(enc, "1").vertex_ids.size(), 1u);
}

TEST(BuildEncoding, CubeHalvesAndPrefixProperty) {
  const SurfaceEncoding enc = build_encoding(load_mesh(test::data_path("cube10.ply")), 3, 0);
  EXPECT_EQ(surface_lookup(enc, "0").vertex_ids.size(), 4u);
  EXPECT_EQ(surface_lookup(enc, "1").vertex_ids.size(), 4u);
  EXPECT_EQ(count_violations(enc), 0);
}

TEST(BuildEncoding, InvariantsOnSphereAndCube) {
  for (int d : {3, 6, 10}) {
    const auto sphere = test::fibonacci_sphere(std::size_t{1} << d, 50.0);
    const TriangleMesh cube = upsample_mesh(make_box(40, 40, 40), d, 1);
    EXPECT_EQ(count_violations(build_encoding(sphere, d, 7)), 0) << "sphere d=" << d;
    EXPECT_EQ(count_violations(build_encoding(cube, d, 7)), 0) << "cube d=" << d;
  }
}

TEST(BuildEncoding, WrongVertexCount) {
  EXPECT_THROW(build_encoding(make_icosphere(1.0, 1), 5, 0), InvalidArgument);
}

TEST(BuildEncoding, SameSeedSameBytes) {
  const TriangleMesh m = upsample_mesh(make_icosphere(30.0, 1), 9, 2);
  EXPECT_EQ(serialize_encoding(build_encoding(m, 9, 4)), serialize_encoding(build_encoding(m, 9, 4)));
}

TEST(BuildEncoding, HalvesAreSpatiallyCoherent) {
  // A long thin box must be cut across its long axis first.
  const SurfaceEncoding enc = build_encoding(upsample_mesh(make_box(200, 10, 10), 8, 0), 8, 0);
  const Vec3 g0 = enc.centroid(1, 0), g1 = enc.centroid(1, 1);
  EXPECT_GT(std::abs(g0.x() - g1.x()), 80.0);
  for (std::uint32_t c = 0; c < 256; ++c) {
    const double x = enc.vertex_at_code(c).x();
    // Within 2 mm of the cut every point may go either way; elsewhere the side must match.
    if (std::abs(x) > 2.0) {
      EXPECT_EQ((c >> 7) == 0, (x < 0) == (g0.x() < 0)) << c;
    }
  }
}

TEST(BalancedBisect, OddCountSplitsFloorHalf) {
  std::vector<Vec3> pts;
  for (int i = 0; i < 7; ++i) pts.emplace_back(i * i, 0.5 * i, 0);
  std::vector<std::uint32_t> ids(7);
  std::iota(ids.begin(), ids.end(), 0u);
  balanced_bisect(pts, ids, 3);
  std::set<std::uint32_t> left(ids.begin(), ids.begin() + 3), right(ids.begin() + 3, ids.end());
  EXPECT_EQ(left.size() + right.size(), 7u);
  // Spatial split: the three smallest x go one way.
  EXPECT_TRUE(left == std::set<std::uint32_t>({0, 1, 2}) || left == std::set<std::uint32_t>({4, 5, 6}));
}

TEST(SurfaceLookup, RootAndLeaves) {
  const SurfaceEncoding enc = test::box_encoding(6);
  const auto root = surface_lookup(enc, "");
  EXPECT_EQ(root.vertex_ids.size(), 64u);
  Vec3 mean = Vec3::Zero();
  for (const Vec3& v : enc.vertices()) mean += v;
  EXPECT_LT((root.centroid - mean / 64.0).norm(), 1e-12);
  for (std::size_t v = 0; v < enc.size(); ++v) {
    const auto leaf = surface_lookup(enc, bits_of(enc.code(v), 6));
    ASSERT_EQ(leaf.vertex_ids, std::vector<std::uint32_t>{static_cast<std::uint32_t>(v)});
    EXPECT_EQ(leaf.centroid, enc.vertices()[v]);
  }
}

TEST(SurfaceLookup, ChildrenWeightedMean) {
  const SurfaceEncoding enc = test::box_encoding(6);
  for (int k = 0; k < 6; ++k) {
    for (std::uint32_t b = 0; b < (1u << k); ++b) {
      const auto p = surface_lookup(enc, bits_of(b, k));
      const auto c0 = surface_lookup(enc, bits_of(b, k) + "0");
      const auto c1 = surface_lookup(enc, bits_of(b, k) + "1");
      ASSERT_EQ(p.vertex_ids.size(), c0.vertex_ids.size() + c1.vertex_ids.size());
      const double n0 = c0.vertex_ids.size(), n1 = c1.vertex_ids.size();
      EXPECT_LT((p.centroid - (n0 * c0.centroid + n1 * c1.centroid) / (n0 + n1)).norm(), 1e-9);
    }
  }
}

TEST(SurfaceLookup, ContiguousCodeRanges) {
  const SurfaceEncoding enc = test::box_encoding(8);
  const auto s = enc.surface(3, 5);
  EXPECT_EQ(s.first, 5u << 5);
  EXPECT_EQ(s.count, 32u);
  EXPECT_EQ(s.centroid, enc.centroid(3, 5));
  const auto pts = enc.surface_points(3, 5);
  ASSERT_EQ(pts.n, 32u);
  for (std::size_t i = 0; i < pts.n; ++i) EXPECT_EQ(pts.x[i], enc.vertex_at_code(s.first + i).x());
}

TEST(SurfaceLookup, BadPrefix) {
  const SurfaceEncoding enc = test::box_encoding(4);
  EXPECT_THROW(surface_lookup(enc, "01010"), InvalidArgument);
  EXPECT_THROW(surface_lookup(enc, "01a"), InvalidArgument);
}

TEST(EncodingFile, RoundTrip) {
  test::TempDir dir("enc");
  for (int d : {4, 17}) {
    const SurfaceEncoding enc = d == 4 ? test::box_encoding(4) : [] {
      // d > 16 exercises the 32-bit code layout without a full k-means build.
      std::vector<Vec3> v(1u << 17);
      std::vector<std::uint32_t> codes(v.size());
      for (std::uint32_t i = 0; i < v.size(); ++i) {
        v[i] = Vec3(i % 97, i % 89, i % 83);
        codes[i] = (i * 40503u) & ((1u << 17) - 1);
      }
      return SurfaceEncoding::from_codes(v, codes, 17);
    }();
    save_encoding(enc, dir / "m.hsenc");
    EXPECT_EQ(load_encoding(dir / "m.hsenc"), enc);
  }
}

TEST(EncodingFile, HeaderLayout) {
  const auto bytes = serialize_encoding(test::box_encoding(4));
  ASSERT_GE(bytes.size(), 24u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 5), "HSENC");
  EXPECT_EQ(bytes[8], 1);   // version
  EXPECT_EQ(bytes[12], 4);  // d
  EXPECT_EQ(bytes[16], 16); // N
  EXPECT_EQ(bytes.size(), 24u + 16 * 24 + 16 * 2 + 4);
}

TEST(EncodingFile, TruncatedIsChecksumError) {
  auto bytes = serialize_encoding(test::box_encoding(5));
  bytes.resize(bytes.size() - 9);
  EXPECT_THROW(deserialize_encoding(bytes), ChecksumError);
}

TEST(EncodingFile, FlippedByteIsChecksumError) {
  auto bytes = serialize_encoding(test::box_encoding(5));
  bytes[40] ^= 0x10;
  EXPECT_THROW(deserialize_encoding(bytes), ChecksumError);
}

TEST(EncodingFile, BadMagicOrVersion) {
  auto bytes = serialize_encoding(test::box_encoding(3));
  auto magic = bytes;
  magic[0] = 'X';
  EXPECT_THROW(deserialize_encoding(magic), FormatError);
  auto version = bytes;
  version[8] = 2;
  EXPECT_THROW(deserialize_encoding(version), FormatError);
}

TEST(EncodingFile, CountDoesNotMatchBits) {
  // d = 16 header announcing 2^15 vertices.
  std::vector<Vec3> v(1u << 15, Vec3::Zero());
  std::vector<std::uint32_t> codes(v.size());
  std::iota(codes.begin(), codes.end(), 0u);
  auto bytes = serialize_encoding(SurfaceEncoding::from_codes(v, codes, 15));
  bytes[12] = 16;
  EXPECT_THROW(deserialize_encoding(bytes), FormatError);
}

TEST(EncodingFile, NonBijectiveCodes) {
  std::vector<Vec3> v(4, Vec3::Zero());
  EXPECT_THROW(SurfaceEncoding::from_codes(v, {0, 1, 1, 3}, 2), FormatError);
}

TEST(EncodingFile, SaveTwiceSameBytes) {
  test::TempDir dir("enc2");
  const SurfaceEncoding enc = test::box_encoding(6, 3);
  save_encoding(enc, dir / "a.hsenc");
  save_encoding(test::box_encoding(6, 3), dir / "b.hsenc");
  EXPECT_EQ(read_bytes(dir / "a.hsenc"), read_bytes(dir / "b.hsenc"));
}
