#include <algorithm>
#include <numeric>
#include <random>
#include <string>

#include "hipose/error.hpp"
#include "hipose/kabsch.hpp"
#include "hipose/solver.hpp"

namespace hipose {
namespace {

struct DecodedPairs {
  std::vector<Vec3> model, camera;
};

DecodedPairs decode_full(const SurfaceEncoding& enc, std::span<const Correspondence> corrs) {
  DecodedPairs out;
  out.model.reserve(corrs.size());
  out.camera.reserve(corrs.size());
  for (std::size_t i = 0; i < corrs.size(); ++i) {
    if (corrs[i].code.size() != static_cast<std::size_t>(enc.bits())) {
      throw InvalidArgument("correspondence " + std::to_string(i) + " has a " +
                            std::to_string(corrs[i].code.size()) + "-bit code, encoding has " +
                            std::to_string(enc.bits()));
    }
    out.model.push_back(enc.vertex_at_code(quantize_packed(corrs[i].code.values())));
    out.camera.push_back(corrs[i].point);
  }
  return out;
}

struct Columns {
  std::vector<double> x, y, z;

  explicit Columns(const std::vector<Vec3>& pts) {
    x.reserve(pts.size());
    y.reserve(pts.size());
    z.reserve(pts.size());
    for (const Vec3& p : pts) {
      x.push_back(p.x());
      y.push_back(p.y());
      z.push_back(p.z());
    }
  }
  kernels::PointsView view() const { return {x.data(), y.data(), z.data(), x.size()}; }
};

}  // namespace

SolveReport plain_kabsch_solve(const SurfaceEncoding& enc, std::span<const Correspondence> corrs) {
  const DecodedPairs pairs = decode_full(enc, corrs);
  SolveReport report;
  report.solver = "plain";
  report.pose = kabsch(pairs.model, pairs.camera);
  report.kabsch_solves = 1;
  report.final_inliers.resize(corrs.size());
  std::iota(report.final_inliers.begin(), report.final_inliers.end(), 0u);
  return report;
}

void RansacParams::validate() const {
  if (sample_size < 3) throw InvalidArgument("RANSAC sample size must be >= 3");
  if (iterations < 1) throw InvalidArgument("RANSAC needs at least one iteration");
  if (!(inlier_distance > 0.0)) throw InvalidArgument("RANSAC inlier distance must be > 0");
  if (min_inliers < 3) throw InvalidArgument("RANSAC min_inliers must be >= 3");
}

SolveReport ransac_kabsch_solve(const SurfaceEncoding& enc, std::span<const Correspondence> corrs,
                                const RansacParams& params) {
  params.validate();
  const DecodedPairs pairs = decode_full(enc, corrs);
  const std::size_t n = corrs.size();
  const auto sample = static_cast<std::size_t>(params.sample_size);
  if (n < sample) {
    throw SolverError("RANSAC needs at least " + std::to_string(sample) + " correspondences", 0);
  }
  const Columns model_cols(pairs.model), camera_cols(pairs.camera);
  const double max_sq = params.inlier_distance * params.inlier_distance;

  SolveReport report;
  report.solver = "ransac";
  std::mt19937_64 rng(params.seed);
  std::vector<std::uint32_t> pool(n);
  std::iota(pool.begin(), pool.end(), 0u);
  std::vector<Vec3> sm(sample), sc(sample);
  std::size_t best_count = 0;
  Pose best;
  for (int it = 0; it < params.iterations; ++it) {
    // Partial Fisher-Yates: the first `sample` slots become a uniform draw without replacement.
    for (std::size_t k = 0; k < sample; ++k) {
      const std::size_t j = k + std::uniform_int_distribution<std::size_t>(0, n - 1 - k)(rng);
      std::swap(pool[k], pool[j]);
      sm[k] = pairs.model[pool[k]];
      sc[k] = pairs.camera[pool[k]];
    }
    Pose hyp;
    try {
      hyp = kabsch(sm, sc);
    } catch (const DegenerateError&) {
      continue;
    }
    ++report.kabsch_solves;
    const std::size_t count =
        kernels::count_within_posed(model_cols.view(), camera_cols.view(), kernels::Rigid::from(hyp), max_sq);
    if (count > best_count) {
      best_count = count;
      best = hyp;
    }
  }
  if (best_count < static_cast<std::size_t>(params.min_inliers)) {
    throw SolverError("no RANSAC hypothesis reached " + std::to_string(params.min_inliers) +
                      " inliers (best " + std::to_string(best_count) + ")", params.iterations);
  }

  // Same per-pair arithmetic as the counting kernel, so the refit set has best_count members.
  const kernels::Rigid rb = kernels::Rigid::from(best);
  std::vector<Vec3> im, ic;
  for (std::uint32_t i = 0; i < n; ++i) {
    const Vec3& m = pairs.model[i];
    const Vec3& c = pairs.camera[i];
    const double dx = kernels::posed_coord(rb.r, rb.t[0], m.x(), m.y(), m.z()) - c.x();
    const double dy = kernels::posed_coord(rb.r + 3, rb.t[1], m.x(), m.y(), m.z()) - c.y();
    const double dz = kernels::posed_coord(rb.r + 6, rb.t[2], m.x(), m.y(), m.z()) - c.z();
    if ((dx * dx + dy * dy) + dz * dz <= max_sq) {
      report.final_inliers.push_back(i);
      im.push_back(pairs.model[i]);
      ic.push_back(pairs.camera[i]);
    }
  }
  report.pose = kabsch(im, ic);
  ++report.kabsch_solves;
  return report;
}

}  // namespace hipose
