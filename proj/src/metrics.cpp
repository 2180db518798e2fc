#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

#include "hipose/bench.hpp"
#include "hipose/error.hpp"

namespace hipose {

double add_error(const Pose& est, const Pose& gt, kernels::PointsView model) {
  if (model.n == 0) throw InvalidArgument("ADD over an empty model");
  const double sum = kernels::sum_distance_between_poses(model, kernels::Rigid::from(est),
                                                         kernels::Rigid::from(gt));
  return sum / static_cast<double>(model.n);
}

double adds_error(const Pose& est, const Pose& gt, std::span<const Vec3> model, const KdTree& tree) {
  if (model.empty()) throw InvalidArgument("ADD-S over an empty model");
  // |T_est v - T_gt w| = |T_gt^-1 T_est v - w|, so query the model-frame tree.
  const Pose rel = gt.inverse().compose(est);
  double sum = 0.0;
  for (const Vec3& v : model) sum += std::sqrt(tree.nearest(rel.apply(v)).sq_distance);
  return sum / static_cast<double>(model.size());
}

bool add_success(double error, double diameter) { return error < 0.1 * diameter; }

double auc_contribution(double error, double max_threshold) {
  if (!(error >= 0.0)) return error < 0.0 ? 1.0 : 0.0;
  return std::max(0.0, 1.0 - error / max_threshold);
}

double auc(std::span<const double> errors, double max_threshold) {
  if (errors.empty()) return 0.0;
  double sum = 0.0;
  for (double e : errors) sum += auc_contribution(e, max_threshold);
  return sum / static_cast<double>(errors.size());
}

std::vector<double> outlier_precision(const SolveReport& report, const SurfaceEncoding& enc,
                                      std::span<const Correspondence> corrs, double threshold) {
  if (std::none_of(corrs.begin(), corrs.end(), [](const Correspondence& c) { return c.gt_vertex.has_value(); })) {
    throw InvalidArgument("outlier precision needs ground-truth vertices");
  }
  std::vector<std::uint8_t> good(corrs.size(), 0);
  for (std::size_t i = 0; i < corrs.size(); ++i) {
    if (!corrs[i].gt_vertex) continue;
    const Vec3& decoded = enc.vertex_at_code(quantize_packed(corrs[i].code.values()));
    good[i] = (decoded - enc.vertices()[*corrs[i].gt_vertex]).norm() < threshold ? 1 : 0;
  }

  std::vector<std::uint8_t> active(corrs.size(), 1);
  std::size_t n_active = corrs.size();
  std::size_t n_good = static_cast<std::size_t>(std::count(good.begin(), good.end(), 1));
  std::vector<double> out;
  out.reserve(report.iterations.size() + 1);
  for (const IterationRecord& rec : report.iterations) {
    for (std::uint32_t i : rec.flagged) {
      if (i >= corrs.size() || !active[i]) throw InvalidArgument("report does not match correspondences");
      active[i] = 0;
      --n_active;
      n_good -= good[i];
    }
    out.push_back(n_active ? static_cast<double>(n_good) / static_cast<double>(n_active) : 0.0);
  }
  std::size_t final_good = 0;
  for (std::uint32_t i : report.final_inliers) {
    if (i >= corrs.size()) throw InvalidArgument("report does not match correspondences");
    final_good += good[i];
  }
  out.push_back(report.final_inliers.empty()
                    ? 0.0
                    : static_cast<double>(final_good) / static_cast<double>(report.final_inliers.size()));
  return out;
}

}  // namespace hipose
