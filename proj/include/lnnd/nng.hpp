#pragma once

// Exact nearest-neighbor graph (each point joined to its closest other point)
// and its longest edge, the LNND d_n.
//
// Two engines produce identical output: `build_nng_brute` is the serial
// all-pairs reference, `build_nng_fast` answers the same queries from a k-d
// tree in parallel. Both compare squared distances accumulated in coordinate
// order and break ties toward the smallest index, so indices and distances
// agree bit for bit. The square root is taken once per point at the end.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "lnnd/point_process.hpp"

namespace lnnd {

inline double squared_distance(const double* a, const double* b, int dim) noexcept {
  double s = 0.0;
  for (int k = 0; k < dim; ++k) {
    const double diff = a[k] - b[k];
    s += diff * diff;
  }
  return s;
}

struct NngResult {
  std::vector<std::size_t> nn_index;
  std::vector<double> nn_dist;
  double d_n = 0.0;

  friend bool operator==(const NngResult&, const NngResult&) = default;
};

/// Throws DomainError for fewer than two points.
NngResult build_nng_brute(const PointsView& points);
NngResult build_nng_fast(const PointsView& points);

/// Largest nearest-neighbor distance, from the fast engine.
double lnnd(const PointsView& points);

/// Annulus centered at the origin: inner <= |x| < outer.
class AnnulusSpec {
 public:
  AnnulusSpec(double inner, double outer);
  double inner() const noexcept { return inner_; }
  double outer() const noexcept { return outer_; }
  bool contains(std::span<const double> x) const noexcept;

 private:
  double inner_;
  double outer_;
};

/// Largest full-cloud nearest-neighbor distance over the points lying in the
/// annulus; nullopt if the annulus holds no point.
std::optional<double> lnnd_restricted(const PointsView& points, const AnnulusSpec& annulus);
std::optional<double> lnnd_restricted(const PointsView& points, const NngResult& nng,
                                      const AnnulusSpec& annulus);

/// True iff no point lies in B(center, r_outer) \ B(center, r_inner).
bool vacancy_event(const PointsView& points, std::span<const double> center, double r_inner,
                   double r_outer);

}  // namespace lnnd
