#include "lnnd/kdtree.hpp"

#include <algorithm>
#include <numeric>

#include "lnnd/nng.hpp"

namespace lnnd {

KdTree::KdTree(const PointsView& points, std::size_t leaf_size)
    : dim_(points.dim().value()), leaf_size_(std::max<std::size_t>(leaf_size, 1)) {
  const std::size_t n = points.size();
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  if (n == 0) return;
  nodes_.reserve(2 * (n / leaf_size_ + 1));
  bounds_.reserve(nodes_.capacity() * 2 * static_cast<std::size_t>(dim_));
  build(0, n, points);

  const auto d = static_cast<std::size_t>(dim_);
  coords_.resize(n * d);
  for (std::size_t pos = 0; pos < n; ++pos) {
    const auto p = points.point(order_[pos]);
    std::copy(p.begin(), p.end(), coords_.begin() + static_cast<std::ptrdiff_t>(pos * d));
  }
}

std::int64_t KdTree::build(std::size_t begin, std::size_t end, const PointsView& points) {
  const auto d = static_cast<std::size_t>(dim_);
  const auto id = static_cast<std::int64_t>(nodes_.size());
  nodes_.push_back({begin, end, -1, -1});
  const std::size_t b0 = bounds_.size();
  bounds_.resize(b0 + 2 * d);
  double* lo = bounds_.data() + b0;
  double* hi = lo + d;
  std::fill(lo, lo + d, std::numeric_limits<double>::infinity());
  std::fill(hi, hi + d, -std::numeric_limits<double>::infinity());
  const double* all = points.coords().data();
  for (std::size_t i = begin; i < end; ++i) {
    const double* p = all + order_[i] * d;
    for (std::size_t k = 0; k < d; ++k) {
      lo[k] = std::min(lo[k], p[k]);
      hi[k] = std::max(hi[k], p[k]);
    }
  }
  if (end - begin <= leaf_size_) return id;

  std::size_t split = 0;
  double widest = hi[0] - lo[0];
  for (std::size_t k = 1; k < d; ++k) {
    if (hi[k] - lo[k] > widest) {
      widest = hi[k] - lo[k];
      split = k;
    }
  }
  if (!(widest > 0.0)) return id;  // all points coincide

  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                   order_.begin() + static_cast<std::ptrdiff_t>(mid),
                   order_.begin() + static_cast<std::ptrdiff_t>(end),
                   [&](std::size_t a, std::size_t b) { return all[a * d + split] < all[b * d + split]; });
  const std::int64_t left = build(begin, mid, points);
  const std::int64_t right = build(mid, end, points);
  nodes_[static_cast<std::size_t>(id)].left = left;
  nodes_[static_cast<std::size_t>(id)].right = right;
  return id;
}

double KdTree::box_distance(std::int64_t node, const double* q) const noexcept {
  const auto d = static_cast<std::size_t>(dim_);
  const double* lo = bounds_.data() + static_cast<std::size_t>(node) * 2 * d;
  const double* hi = lo + d;
  // Each gap is <= |q_k - p_k| for every point p in the box, and squaring and
  // summing in coordinate order are monotone under rounding, so this never
  // exceeds the squared distance to a point inside.
  double s = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    double gap = 0.0;
    if (q[k] < lo[k]) gap = lo[k] - q[k];
    else if (q[k] > hi[k]) gap = q[k] - hi[k];
    s += gap * gap;
  }
  return s;
}

void KdTree::search(std::int64_t node, const double* q, std::size_t exclude, Neighbor& best) const {
  const Node& nd = nodes_[static_cast<std::size_t>(node)];
  if (nd.left < 0) {
    const auto d = static_cast<std::size_t>(dim_);
    for (std::size_t pos = nd.begin; pos < nd.end; ++pos) {
      const std::size_t idx = order_[pos];
      if (idx == exclude) continue;
      const double d2 = squared_distance(q, coords_.data() + pos * d, dim_);
      if (d2 < best.squared_distance || (d2 == best.squared_distance && idx < best.index)) {
        best = {idx, d2};
      }
    }
    return;
  }
  const double dl = box_distance(nd.left, q);
  const double dr = box_distance(nd.right, q);
  // Equality still descends: a tie with a smaller index may sit there.
  if (dl <= dr) {
    if (dl <= best.squared_distance) search(nd.left, q, exclude, best);
    if (dr <= best.squared_distance) search(nd.right, q, exclude, best);
  } else {
    if (dr <= best.squared_distance) search(nd.right, q, exclude, best);
    if (dl <= best.squared_distance) search(nd.left, q, exclude, best);
  }
}

KdTree::Neighbor KdTree::nearest_other(std::span<const double> query, std::size_t exclude) const {
  Neighbor best;
  if (!nodes_.empty()) search(0, query.data(), exclude, best);
  return best;
}

KdTree::Neighbor KdTree::nearest_other_at(std::size_t pos) const {
  Neighbor best;
  const double* q = coords_.data() + pos * static_cast<std::size_t>(dim_);
  search(0, q, order_[pos], best);
  return best;
}

}  // namespace lnnd
