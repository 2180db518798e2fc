#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "hipose/error.hpp"
#include "hipose/mesh.hpp"
#include "test_util.hpp"

using namespace hipose;
using hipose::test::data_path;

namespace {

double brute_force_diameter(const std::vector<Vec3>& v) {
  double best = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j) best = std::max(best, (v[i] - v[j]).norm());
  return best;
}

}  // namespace

TEST(LoadMesh, TetrahedronObj) {
  const TriangleMesh m = load_mesh(data_path("tetra.obj"));
  EXPECT_EQ(m.size(), 4u);
  EXPECT_EQ(m.faces().size(), 4u);
  EXPECT_DOUBLE_EQ(m.diameter(), std::sqrt(2.0));
}

TEST(LoadMesh, CubePly) {
  const TriangleMesh m = load_mesh(data_path("cube10.ply"));
  EXPECT_EQ(m.size(), 8u);
  EXPECT_EQ(m.faces().size(), 12u);  // quads fan-triangulated
  EXPECT_NEAR(m.diameter(), 10.0 * std::sqrt(3.0), 1e-12);
}

TEST(LoadMesh, FaceIndexOutOfRange) {
  EXPECT_THROW(load_mesh(data_path("bad_face.ply")), ParseError);
}

TEST(LoadMesh, CoplanarIsDegenerate) {
  EXPECT_THROW(load_mesh(data_path("planar.obj")), DegenerateError);
}

TEST(LoadMesh, BinaryPlyRejected) {
  EXPECT_THROW(load_mesh(data_path("binary.ply")), ParseError);
}

TEST(LoadMesh, MissingFile) {
  EXPECT_THROW(load_mesh(data_path("nope.ply")), Error);
}

TEST(LoadMesh, MalformedObj) {
  std::istringstream in("v 0 0 0\nv 1 0 x\n");
  EXPECT_THROW(parse_obj(in), ParseError);
}

TEST(LoadMesh, ObjNegativeIndicesAndSlashes) {
  std::istringstream in("v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\nf -4/1/1 -3/2/2 -2/3/3\nf 1//1 2//2 4//4\n");
  const TriangleMesh m = parse_obj(in);
  ASSERT_EQ(m.faces().size(), 2u);
  EXPECT_EQ(m.faces()[0], (Face{0, 1, 2}));
  EXPECT_EQ(m.faces()[1], (Face{0, 1, 3}));
}

TEST(LoadMesh, PlyRoundTrip) {
  test::TempDir dir("mesh");
  const TriangleMesh a = make_icosphere(5.0, 1);
  save_ply(a, dir / "s.ply");
  const TriangleMesh b = load_mesh(dir / "s.ply");
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a.vertices()[i], b.vertices()[i]);
  EXPECT_EQ(a.faces(), b.faces());
}

TEST(Diameter, MatchesBruteForce) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 30.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Vec3> pts(50 + 37 * trial);
    for (auto& p : pts) p = Vec3(g(rng), 0.5 * g(rng), 2.0 * g(rng));
    EXPECT_DOUBLE_EQ(compute_diameter(pts), brute_force_diameter(pts));
  }
}

TEST(Upsample, AlreadyPowerOfTwoIsNoOp) {
  const TriangleMesh m = load_mesh(data_path("cube10.ply"));
  const TriangleMesh u = upsample_mesh(m, 3);
  EXPECT_EQ(u.vertices(), m.vertices());
}

TEST(Upsample, CubeTo1024OnSurface) {
  const TriangleMesh m = load_mesh(data_path("cube10.ply"));
  const TriangleMesh u = upsample_mesh(m, 10, 3);
  ASSERT_EQ(u.size(), 1024u);
  for (std::size_t i = 0; i < m.size(); ++i) EXPECT_EQ(u.vertices()[i], m.vertices()[i]);
  for (const Vec3& v : u.vertices()) {
    double plane = 1e300;
    for (int a = 0; a < 3; ++a) {
      EXPECT_GE(v[a], -1e-9);
      EXPECT_LE(v[a], 10.0 + 1e-9);
      plane = std::min({plane, std::abs(v[a]), std::abs(v[a] - 10.0)});
    }
    EXPECT_LT(plane, 1e-9);
  }
  EXPECT_DOUBLE_EQ(u.diameter(), m.diameter());
}

TEST(Upsample, Deterministic) {
  const TriangleMesh m = make_icosphere(20.0, 1);
  EXPECT_EQ(upsample_mesh(m, 9, 11).vertices(), upsample_mesh(m, 9, 11).vertices());
  EXPECT_NE(upsample_mesh(m, 9, 11).vertices(), upsample_mesh(m, 9, 12).vertices());
}

TEST(Upsample, TooFewBits) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Vec3> pts(100);
  for (auto& p : pts) p = Vec3(u(rng), u(rng), u(rng));
  const TriangleMesh m(pts, {});
  EXPECT_THROW(upsample_mesh(m, 6), InvalidArgument);
}

TEST(Builtins, BoxAndSphere) {
  const TriangleMesh box = make_box(150, 100, 60);
  EXPECT_EQ(box.size(), 8u);
  EXPECT_NEAR(box.diameter(), std::sqrt(150.0 * 150 + 100 * 100 + 60 * 60), 1e-12);
  const TriangleMesh s = make_icosphere(10.0, 2);
  EXPECT_EQ(s.size(), 162u);
  for (const Vec3& v : s.vertices()) EXPECT_NEAR(v.norm(), 10.0, 1e-12);
}
