#include "hipose/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "hipose/error.hpp"
#include "hipose/kabsch.hpp"

namespace hipose {
namespace {

bool same_pose(const Pose& a, const Pose& b) { return a.R == b.R && a.t == b.t; }

bool same_double(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

double median_of(std::vector<double> values) {
  const std::size_t n = values.size();
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(values.begin(), mid, values.end());
  const double upper = *mid;
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), mid);
  return 0.5 * (lower + upper);
}

void check_code_lengths(const SurfaceEncoding& enc, std::span<const Correspondence> corrs) {
  for (std::size_t i = 0; i < corrs.size(); ++i) {
    if (corrs[i].code.size() != static_cast<std::size_t>(enc.bits())) {
      throw InvalidArgument("correspondence " + std::to_string(i) + " has a " +
                            std::to_string(corrs[i].code.size()) + "-bit code, encoding has " +
                            std::to_string(enc.bits()));
    }
  }
}

}  // namespace

bool IterationRecord::operator==(const IterationRecord& o) const {
  return iteration == o.iteration && inliers == o.inliers &&
         same_double(median_distance, o.median_distance) && same_double(threshold, o.threshold) &&
         flagged == o.flagged && same_pose(pose, o.pose);
}

bool SolveReport::operator==(const SolveReport& o) const {
  return solver == o.solver && same_pose(pose, o.pose) && iterations == o.iterations &&
         final_inliers == o.final_inliers && kabsch_solves == o.kabsch_solves;
}

void SolverConfig::validate(int bits) const {
  if (m_default < 1 || m_default > bits) {
    throw InvalidArgument("m_default must be in [1, " + std::to_string(bits) + "]");
  }
  if (!(tau > 0.0 && tau < 0.5)) throw InvalidArgument("tau must satisfy 0 < tau < 0.5");
  if (!(beta >= 1.0) || !std::isfinite(beta)) throw InvalidArgument("beta must be >= 1");
  if (min_inliers < 3) throw InvalidArgument("min_inliers must be >= 3");
}

double point_surface_distance(const Vec3& point, kernels::PointsView surface, const Pose& pose) {
  const double p[3] = {point.x(), point.y(), point.z()};
  return std::sqrt(kernels::min_sq_distance_posed(surface, kernels::Rigid::from(pose), p));
}

double point_surface_distance(const Vec3& point, std::span<const Vec3> surface, const Pose& pose) {
  std::vector<double> xs, ys, zs;
  xs.reserve(surface.size());
  ys.reserve(surface.size());
  zs.reserve(surface.size());
  for (const Vec3& v : surface) {
    xs.push_back(v.x());
    ys.push_back(v.y());
    zs.push_back(v.z());
  }
  return point_surface_distance(point, kernels::PointsView{xs.data(), ys.data(), zs.data(), xs.size()},
                                pose);
}

SolveReport hierarchical_solve(const SurfaceEncoding& enc, std::span<const Correspondence> corrs,
                               const SolverConfig& cfg) {
  const int d = enc.bits();
  cfg.validate(d);
  check_code_lengths(enc, corrs);
  const std::size_t n = corrs.size();
  const auto min_inliers = static_cast<std::size_t>(cfg.min_inliers);
  if (n < min_inliers) {
    throw SolverError("only " + std::to_string(n) + " correspondences, need " +
                      std::to_string(min_inliers), 0);
  }

  std::vector<std::uint32_t> code(n);
  std::vector<int> start_level(n), level(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto soft = corrs[i].code.values();
    code[i] = quantize_packed(soft);
    start_level[i] = initial_bit(trust_bit_of_soft(soft, cfg.tau), cfg.m_default, d);
    level[i] = start_level[i];
  }

  std::vector<std::uint32_t> active(n);
  std::iota(active.begin(), active.end(), 0u);
  std::vector<Vec3> model, camera;
  model.reserve(n);
  camera.reserve(n);
  auto solve_active = [&]() {
    model.clear();
    camera.clear();
    for (std::uint32_t i : active) {
      model.push_back(enc.centroid(level[i], enc.prefix_of(code[i], level[i])));
      camera.push_back(corrs[i].point);
    }
    return kabsch(model, camera);
  };

  SolveReport report;
  report.solver = "hierarchical";
  Pose pose = solve_active();
  ++report.kabsch_solves;
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  report.iterations.push_back({0, active.size(), nan, nan, {}, pose});

  const int rounds = d - cfg.m_default;
  std::vector<double> dist;
  for (int it = 0; it < rounds; ++it) {
    const kernels::Rigid rigid = kernels::Rigid::from(pose);
    dist.resize(active.size());
    for (std::size_t k = 0; k < active.size(); ++k) {
      const std::uint32_t i = active[k];
      const Vec3& p = corrs[i].point;
      const double q[3] = {p.x(), p.y(), p.z()};
      dist[k] = std::sqrt(kernels::min_sq_distance_posed(
          enc.surface_points(level[i], enc.prefix_of(code[i], level[i])), rigid, q));
    }
    const double median = median_of(dist);
    double stat = median;
    if (cfg.inlier_rule == InlierRule::mean) {
      stat = std::accumulate(dist.begin(), dist.end(), 0.0) / static_cast<double>(dist.size());
    }
    const double threshold = cfg.beta * stat;

    IterationRecord rec{it + 1, 0, median, threshold, {}, Pose{}};
    std::vector<std::uint32_t> kept;
    kept.reserve(active.size());
    for (std::size_t k = 0; k < active.size(); ++k) {
      (dist[k] > threshold ? rec.flagged : kept).push_back(active[k]);
    }
    active = std::move(kept);
    if (active.size() < min_inliers) {
      throw SolverError("inlier set collapsed to " + std::to_string(active.size()) +
                        " at iteration " + std::to_string(it + 1), it + 1);
    }
    // A point whose trust bit started it deeper than m_default + it + 1 keeps its surface.
    for (std::uint32_t i : active) level[i] = std::min(d, std::max(start_level[i], cfg.m_default + it + 1));

    pose = solve_active();
    ++report.kabsch_solves;
    rec.inliers = active.size();
    rec.pose = pose;
    report.iterations.push_back(std::move(rec));
  }

  // Point-to-point solve over every correspondence never flagged.
  model.clear();
  camera.clear();
  for (std::uint32_t i : active) {
    model.push_back(enc.vertex_at_code(code[i]));
    camera.push_back(corrs[i].point);
  }
  report.pose = kabsch(model, camera);
  ++report.kabsch_solves;
  report.final_inliers = active;
  return report;
}

}  // namespace hipose
