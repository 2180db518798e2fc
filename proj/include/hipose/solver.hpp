#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hipose/correspondence.hpp"
#include "hipose/encoding.hpp"
#include "hipose/geometry.hpp"

namespace hipose {

enum class InlierRule { median, mean };

struct SolverConfig {
  int m_default = 10;
  double tau = 0.02;
  InlierRule inlier_rule = InlierRule::median;
  /// Outlier iff l > beta * statistic(l). Default fixed by the sweep in docs/beta_sweep.md.
  double beta = 2.0;
  int min_inliers = 4;

  /// Throws InvalidArgument if a field is out of range for a `bits`-deep encoding.
  void validate(int bits) const;
};

/// One Kabsch solve inside the solver. Iteration 0 is the initial solve on the
/// starting surfaces; iteration k >= 1 follows the k-th pruning step.
struct IterationRecord {
  int iteration = 0;
  /// Correspondences entering this solve.
  std::size_t inliers = 0;
  /// Median of l over the correspondences active before pruning (NaN for iteration 0).
  double median_distance = 0.0;
  /// beta * statistic used for pruning (NaN for iteration 0).
  double threshold = 0.0;
  /// Ids flagged as outliers by the pruning step that preceded this solve.
  std::vector<std::uint32_t> flagged;
  Pose pose;

  bool operator==(const IterationRecord&) const;
};

struct SolveReport {
  std::string solver;
  Pose pose;
  std::vector<IterationRecord> iterations;
  /// Correspondences used by the final solve, ascending.
  std::vector<std::uint32_t> final_inliers;
  /// Number of Kabsch solves performed (RANSAC: hypotheses that were not degenerate).
  std::size_t kabsch_solves = 0;

  bool operator==(const SolveReport&) const;
};

/// Point-to-surface distance: min over the surface's vertices of |R v + t - P|.
double point_surface_distance(const Vec3& point, kernels::PointsView surface, const Pose& pose);
double point_surface_distance(const Vec3& point, std::span<const Vec3> surface, const Pose& pose);

/// Coarse-to-fine correspondence pruning over the hierarchical encoding.
///
/// Each correspondence starts at level max(trust bit, m_default). The initial
/// pose comes from Kabsch on (surface centroid, point) pairs. Then for
/// d - m_default iterations: evaluate l against the current surface under the
/// previous pose, flag l > beta * median as outliers (permanently), descend one
/// level for points whose trust bit no longer holds them, and re-solve on the
/// survivors' centroids. A final Kabsch runs on the point-to-point pairs of all
/// never-flagged correspondences.
///
/// Throws SolverError when fewer than min_inliers remain, DegenerateError when a
/// solve is degenerate, InvalidArgument on config or code length mismatches.
SolveReport hierarchical_solve(const SurfaceEncoding& enc, std::span<const Correspondence> corrs,
                               const SolverConfig& cfg);

/// Decode every code to its full-depth vertex and run one Kabsch over all pairs.
SolveReport plain_kabsch_solve(const SurfaceEncoding& enc, std::span<const Correspondence> corrs);

struct RansacParams {
  int sample_size = 10;
  int iterations = 1000;
  /// Max point-pair distance (mm) for a correspondence to count as inlier.
  double inlier_distance = 20.0;
  int min_inliers = 4;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Hypothesize-and-verify over full-depth point-to-point pairs; the best
/// hypothesis (most inliers, earliest on ties) is refit on its inliers.
SolveReport ransac_kabsch_solve(const SurfaceEncoding& enc, std::span<const Correspondence> corrs,
                                const RansacParams& params);

/// Report JSON (see README for the schema). Doubles are written round-trip exact.
std::string report_to_json(const SolveReport& report, int indent = 2);
SolveReport report_from_json(const std::string& text);

/// Solver settings from a TOML document with optional [solver] and [ransac] tables.
struct SolverSettings {
  std::string solver = "hierarchical";
  SolverConfig hierarchical;
  RansacParams ransac;
};
SolverSettings load_solver_settings(const std::filesystem::path& path);
SolverSettings parse_solver_settings(std::string_view toml_text);

}  // namespace hipose
