#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "lnnd/point_process.hpp"

namespace lnnd {

/// Static k-d tree over a point set. Nodes split at the median of the widest
/// bounding-box side and keep the tight bounding box of their points, which
/// gives a valid lower bound on the distance to any point inside.
class KdTree {
 public:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  explicit KdTree(const PointsView& points, std::size_t leaf_size = 10);

  struct Neighbor {
    std::size_t index = npos;  // original point index
    double squared_distance = std::numeric_limits<double>::infinity();
  };

  /// Nearest point to `query` whose original index differs from `exclude`;
  /// ties go to the smallest index.
  Neighbor nearest_other(std::span<const double> query, std::size_t exclude) const;

  /// Same, for the point stored at tree position `pos` (see `order`).
  Neighbor nearest_other_at(std::size_t pos) const;

  std::size_t size() const noexcept { return order_.size(); }
  /// Tree position -> original index. Iterating positions in order keeps
  /// consecutive queries spatially close.
  std::span<const std::size_t> order() const noexcept { return order_; }

 private:
  struct Node {
    std::size_t begin;
    std::size_t end;
    std::int64_t left;  // -1 for leaves
    std::int64_t right;
  };

  std::int64_t build(std::size_t begin, std::size_t end, const PointsView& points);
  double box_distance(std::int64_t node, const double* q) const noexcept;
  void search(std::int64_t node, const double* q, std::size_t exclude, Neighbor& best) const;

  int dim_;
  std::size_t leaf_size_;
  std::vector<std::size_t> order_;
  std::vector<double> coords_;  // permuted, row-major
  std::vector<Node> nodes_;
  std::vector<double> bounds_;  // per node: lo[0..d), hi[0..d)
};

}  // namespace lnnd
