#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hipose/geometry.hpp"

namespace hipose {

/// Static 3D kd-tree for exact nearest-neighbour queries.
class KdTree {
 public:
  explicit KdTree(std::span<const Vec3> points, std::size_t leaf_size = 8);

  struct Hit {
    std::uint32_t index;
    double sq_distance;
  };
  /// Exact nearest point; ties resolve to the lowest index. Requires a non-empty tree.
  Hit nearest(const Vec3& query) const;

  std::size_t size() const { return points_.size(); }

 private:
  struct Node {
    std::uint32_t begin, end;  // range in order_
    std::int32_t left = -1, right = -1;
    Vec3 lo, hi;  // bounding box of the node's points
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end);
  void search(std::int32_t node, const Vec3& q, Hit& best) const;
  static double box_sq_distance(const Node& node, const Vec3& q);

  std::vector<Vec3> points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
  std::size_t leaf_size_;
};

}  // namespace hipose
