#include "hipose/kdtree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "hipose/error.hpp"

namespace hipose {

KdTree::KdTree(std::span<const Vec3> points, std::size_t leaf_size)
    : points_(points.begin(), points.end()), order_(points.size()), leaf_size_(std::max<std::size_t>(leaf_size, 1)) {
  std::iota(order_.begin(), order_.end(), 0u);
  if (!points_.empty()) {
    nodes_.reserve(2 * points_.size() / leaf_size_ + 1);
    build(0, static_cast<std::uint32_t>(points_.size()));
  }
}

std::int32_t KdTree::build(std::uint32_t begin, std::uint32_t end) {
  const auto id = static_cast<std::int32_t>(nodes_.size());
  Vec3 lo = points_[order_[begin]], hi = lo;
  for (std::uint32_t k = begin; k < end; ++k) {
    lo = lo.cwiseMin(points_[order_[k]]);
    hi = hi.cwiseMax(points_[order_[k]]);
  }
  nodes_.push_back({begin, end, -1, -1, lo, hi});
  if (end - begin <= leaf_size_) return id;

  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  if (hi[axis] == lo[axis]) return id;  // all coincident: keep as leaf

  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     return points_[a][axis] < points_[b][axis] ||
                            (points_[a][axis] == points_[b][axis] && a < b);
                   });
  const std::int32_t left = build(begin, mid);
  const std::int32_t right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

double KdTree::box_sq_distance(const Node& node, const Vec3& q) {
  double sum = 0.0;
  for (int a = 0; a < 3; ++a) {
    const double below = node.lo[a] - q[a];
    const double above = q[a] - node.hi[a];
    const double gap = below > 0.0 ? below : (above > 0.0 ? above : 0.0);
    sum += gap * gap;
  }
  return sum;
}

KdTree::Hit KdTree::nearest(const Vec3& query) const {
  if (points_.empty()) throw InvalidArgument("nearest() on an empty kd-tree");
  Hit best{0, std::numeric_limits<double>::infinity()};
  search(0, query, best);
  return best;
}

void KdTree::search(std::int32_t node_id, const Vec3& q, Hit& best) const {
  const Node& node = nodes_[node_id];
  if (node.left < 0) {
    for (std::uint32_t k = node.begin; k < node.end; ++k) {
      const std::uint32_t idx = order_[k];
      const double d = (points_[idx] - q).squaredNorm();
      if (d < best.sq_distance || (d == best.sq_distance && idx < best.index)) best = {idx, d};
    }
    return;
  }
  const double dl = box_sq_distance(nodes_[node.left], q);
  const double dr = box_sq_distance(nodes_[node.right], q);
  const bool left_first = dl <= dr;
  const std::int32_t near = left_first ? node.left : node.right;
  const std::int32_t far = left_first ? node.right : node.left;
  // `<=` keeps equidistant points in play so ties still resolve to the lowest index.
  if ((left_first ? dl : dr) <= best.sq_distance) search(near, q, best);
  if ((left_first ? dr : dl) <= best.sq_distance) search(far, q, best);
}

}  // namespace hipose
