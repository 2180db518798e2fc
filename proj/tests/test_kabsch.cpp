#include <gtest/gtest.h>

#include <random>

#include "hipose/error.hpp"
#include "hipose/kabsch.hpp"
#include "test_util.hpp"

using namespace hipose;

namespace {

std::vector<Vec3> random_cloud(std::mt19937_64& rng, std::size_t n, double scale = 50.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<Vec3> pts(n);
  for (auto& p : pts) p = Vec3(u(rng), u(rng), u(rng));
  return pts;
}

std::vector<Vec3> transformed(const Pose& pose, const std::vector<Vec3>& pts) {
  std::vector<Vec3> out;
  for (const Vec3& p : pts) out.push_back(pose.apply(p));
  return out;
}

}  // namespace

TEST(Kabsch, Identity) {
  std::mt19937_64 rng(1);
  const auto pts = random_cloud(rng, 20);
  const Pose p = kabsch(pts, pts);
  EXPECT_LT((p.R - Mat3::Identity()).norm(), 1e-12);
  EXPECT_LT(p.t.norm(), 1e-12);
}

TEST(Kabsch, Rotation90AboutZ) {
  const std::vector<Vec3> model{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 2, 0), Vec3(0, 0, 3)};
  const Pose truth{axis_angle(Vec3::UnitZ(), M_PI / 2), Vec3(5, 0, 0)};
  const Pose p = kabsch(model, transformed(truth, model));
  EXPECT_LT((p.R - truth.R).norm(), 1e-10);
  EXPECT_LT((p.t - truth.t).norm(), 1e-10);
}

TEST(Kabsch, MirroredDataStillProper) {
  std::mt19937_64 rng(2);
  const auto model = random_cloud(rng, 30);
  std::vector<Vec3> mirrored;
  for (const Vec3& v : model) mirrored.emplace_back(-v.x(), v.y(), v.z());
  const Pose p = kabsch(model, mirrored);
  EXPECT_NEAR(p.R.determinant(), 1.0, 1e-12);
  EXPECT_TRUE(p.is_valid());
}

TEST(Kabsch, RandomExactTransforms) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto model = random_cloud(rng, 3 + trial % 20);
    const Pose truth = test::random_pose(rng);
    const Pose p = kabsch(model, transformed(truth, model));
    ASSERT_LT(rotation_distance(p.R, truth.R), 1e-10);
    ASSERT_LT((p.t - truth.t).norm(), 1e-9);
  }
}

TEST(Kabsch, WeightsSelectSubset) {
  std::mt19937_64 rng(4);
  auto model = random_cloud(rng, 12);
  const Pose truth = test::random_pose(rng);
  auto cam = transformed(truth, model);
  std::vector<double> w(12, 1.0);
  for (int i = 8; i < 12; ++i) {
    cam[i] += Vec3(100, -50, 30);
    w[i] = 0.0;
  }
  const Pose p = kabsch(model, cam, w);
  EXPECT_LT(rotation_distance(p.R, truth.R), 1e-10);
}

TEST(Kabsch, Degenerate) {
  const std::vector<Vec3> line{Vec3(0, 0, 0), Vec3(1, 1, 1), Vec3(2, 2, 2)};
  EXPECT_THROW(kabsch(line, line), DegenerateError);
  const std::vector<Vec3> two{Vec3(0, 0, 0), Vec3(1, 0, 0)};
  EXPECT_THROW(kabsch(two, two), DegenerateError);
  const std::vector<Vec3> same(5, Vec3(1, 2, 3));
  EXPECT_THROW(kabsch(same, same), DegenerateError);
}

TEST(Kabsch, SizeMismatch) {
  const std::vector<Vec3> a(4, Vec3::Zero()), b(5, Vec3::Zero());
  EXPECT_THROW(kabsch(a, b), InvalidArgument);
}

TEST(Kabsch, PerturbationDoesNotLowerCost) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> noise(0.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto model = random_cloud(rng, 40);
    auto cam = transformed(test::random_pose(rng), model);
    for (auto& c : cam) c += Vec3(noise(rng), noise(rng), noise(rng));
    const Pose best = kabsch(model, cam);
    const double cost = alignment_cost(model, cam, best);
    for (int a = 0; a < 6; ++a) {
      Vec3 axis = Vec3::Zero();
      axis[a % 3] = 1.0;
      Pose q = best;
      q.R = best.R * axis_angle(axis, a < 3 ? 1e-3 : -1e-3);
      // Re-optimize translation for the perturbed rotation.
      Vec3 mm = Vec3::Zero(), mc = Vec3::Zero();
      for (std::size_t i = 0; i < model.size(); ++i) {
        mm += model[i];
        mc += cam[i];
      }
      q.t = (mc - q.R * mm) / static_cast<double>(model.size());
      EXPECT_GE(alignment_cost(model, cam, q), cost);
    }
  }
}

TEST(Geometry, RotationDistance) {
  const Mat3 a = axis_angle(Vec3(1, 2, 3), 0.3);
  EXPECT_NEAR(rotation_distance(a, a * axis_angle(Vec3(0, 1, 0), 1e-9)), 1e-9, 1e-15);
  EXPECT_NEAR(rotation_distance(Mat3::Identity(), axis_angle(Vec3::UnitX(), M_PI)), M_PI, 1e-12);
  const Pose p{a, Vec3(1, 2, 3)};
  const Pose id = p.compose(p.inverse());
  EXPECT_LT((id.R - Mat3::Identity()).norm(), 1e-15);
  EXPECT_LT(id.t.norm(), 1e-14);
}
