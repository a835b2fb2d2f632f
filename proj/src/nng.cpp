#include "lnnd/nng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lnnd/errors.hpp"
#include "lnnd/kdtree.hpp"

namespace lnnd {

namespace {

void require_two_points(const PointsView& points) {
  if (points.size() < 2) {
    throw DomainError("nearest-neighbor graph needs at least 2 points, got " +
                      std::to_string(points.size()));
  }
}

NngResult finish(std::vector<std::size_t> index, const std::vector<double>& squared) {
  NngResult out;
  out.nn_index = std::move(index);
  out.nn_dist.resize(squared.size());
  double max_sq = 0.0;
  for (std::size_t i = 0; i < squared.size(); ++i) {
    out.nn_dist[i] = std::sqrt(squared[i]);
    max_sq = std::max(max_sq, squared[i]);
  }
  out.d_n = std::sqrt(max_sq);
  return out;
}

}  // namespace

NngResult build_nng_brute(const PointsView& points) {
  require_two_points(points);
  const std::size_t n = points.size();
  const int dim = points.dim().value();
  const double* xs = points.coords().data();
  std::vector<std::size_t> index(n);
  std::vector<double> squared(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = xs + i * static_cast<std::size_t>(dim);
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_j = i;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d2 = squared_distance(xi, xs + j * static_cast<std::size_t>(dim), dim);
      if (d2 < best) {
        best = d2;
        best_j = j;
      }
    }
    index[i] = best_j;
    squared[i] = best;
  }
  return finish(std::move(index), squared);
}

NngResult build_nng_fast(const PointsView& points) {
  require_two_points(points);
  const KdTree tree(points);
  const auto n = static_cast<long long>(points.size());
  const auto order = tree.order();
  std::vector<std::size_t> index(points.size());
  std::vector<double> squared(points.size());
#pragma omp parallel for schedule(dynamic, 512)
  for (long long pos = 0; pos < n; ++pos) {
    const auto p = static_cast<std::size_t>(pos);
    const auto nb = tree.nearest_other_at(p);
    index[order[p]] = nb.index;
    squared[order[p]] = nb.squared_distance;
  }
  return finish(std::move(index), squared);
}

double lnnd(const PointsView& points) { return build_nng_fast(points).d_n; }

AnnulusSpec::AnnulusSpec(double inner, double outer) : inner_(inner), outer_(outer) {
  if (!(inner >= 0.0) || !(outer > inner)) {
    throw DomainError("annulus requires 0 <= inner < outer");
  }
}

bool AnnulusSpec::contains(std::span<const double> x) const noexcept {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s >= inner_ * inner_ && s < outer_ * outer_;
}

std::optional<double> lnnd_restricted(const PointsView& points, const NngResult& nng,
                                      const AnnulusSpec& annulus) {
  if (nng.nn_dist.size() != points.size()) {
    throw DomainError("nearest-neighbor result does not match the point set");
  }
  std::optional<double> best;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (annulus.contains(points.point(i))) best = std::max(best.value_or(0.0), nng.nn_dist[i]);
  }
  return best;
}

std::optional<double> lnnd_restricted(const PointsView& points, const AnnulusSpec& annulus) {
  require_two_points(points);
  return lnnd_restricted(points, build_nng_fast(points), annulus);
}

bool vacancy_event(const PointsView& points, std::span<const double> center, double r_inner,
                   double r_outer) {
  if (!(r_inner >= 0.0) || !(r_outer >= r_inner)) {
    throw DomainError("vacancy_event requires 0 <= r_inner <= r_outer");
  }
  const Annulus region{std::vector<double>(center.begin(), center.end()), r_inner, r_outer};
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (region_contains(region, points.point(i))) return false;
  }
  return true;
}

}  // namespace lnnd
