#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "lnnd/dimension.hpp"
#include "lnnd/rng.hpp"

namespace lnnd {

/// Non-owning, row-major view of points in R^d.
class PointsView {
 public:
  PointsView(Dimension d, std::span<const double> coords);

  Dimension dim() const noexcept { return d_; }
  std::size_t size() const noexcept { return coords_.size() / static_cast<std::size_t>(d_.value()); }
  bool empty() const noexcept { return coords_.empty(); }
  std::span<const double> coords() const noexcept { return coords_; }
  std::span<const double> point(std::size_t i) const noexcept {
    const auto d = static_cast<std::size_t>(d_.value());
    return coords_.subspan(i * d, d);
  }
  /// First `count` points.
  PointsView prefix(std::size_t count) const;

 private:
  Dimension d_;
  std::span<const double> coords_;
};

enum class CloudKind { binomial, poisson, coupled_component };

const char* to_string(CloudKind k);
CloudKind parse_cloud_kind(const std::string& s);

/// A sample of points with the provenance needed to regenerate it.
struct PointCloud {
  Dimension d{2};
  std::vector<double> coords;  // row-major, size() * d values
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;
  CloudKind kind = CloudKind::binomial;
  double mean = 0.0;  // n for binomial, intensity multiplier for poisson

  std::size_t size() const noexcept { return coords.size() / static_cast<std::size_t>(d.value()); }
  PointsView view() const { return PointsView(d, coords); }
};

/// Points [first, first + count) of the shared standard-normal sequence named
/// by `stream`. Point i depends only on (stream, i).
std::vector<double> sample_gaussian_points(Dimension d, const StreamKey& stream,
                                           std::size_t first, std::size_t count);

/// n i.i.d. standard-normal points: the first n of the replicate's sequence.
PointCloud sample_cloud(Dimension d, std::size_t n, std::uint64_t seed,
                        std::uint64_t replicate = 0);

/// Arrival times of a unit-rate Poisson process on (0, horizon]; counting the
/// arrivals <= n gives nondecreasing N_n with independent Poisson increments.
struct MonotonePoissonFamily {
  std::vector<double> arrival_times;  // increasing

  std::size_t count(double n) const;
};

MonotonePoissonFamily sample_arrivals(double horizon, std::uint64_t seed,
                                      std::uint64_t replicate = 0);

/// Nested Poisson clouds P_{n_1} subset P_{n_2} subset ... drawn from one
/// point sequence. The cloud at n has intensity n phi.
struct PoissonizedFamily {
  std::vector<double> n_grid;
  std::vector<std::size_t> counts;  // N_n for each grid entry
  PointCloud base;                  // max(counts) points

  PointsView view(std::size_t grid_index) const { return base.view().prefix(counts.at(grid_index)); }
  PointCloud cloud(std::size_t grid_index) const;
};

PoissonizedFamily poissonize(Dimension d, const std::vector<double>& n_grid,
                             std::uint64_t seed, std::uint64_t replicate = 0);

/// P_n^- (first N points), X_n (first n), P_n^+ (first N + M points) on one
/// shared sequence, with N ~ Poisson(n - n^{3/4}) and M ~ Poisson(2 n^{3/4})
/// independent of each other and of the points.
struct CoupledTriple {
  Dimension d{2};
  std::size_t n = 0;
  std::size_t n_minus = 0;
  std::size_t extra = 0;
  std::vector<double> base_points;  // max(n, n_minus + extra) points
  bool h_n = false;                 // P_n^- subset X_n subset P_n^+

  PointsView base() const { return PointsView(d, base_points); }
  PointsView minus() const { return base().prefix(n_minus); }
  PointsView binomial() const { return base().prefix(n); }
  PointsView plus() const { return base().prefix(n_minus + extra); }
  /// I_n = P_n^+ \ P_n^-: points n_minus .. n_minus + extra - 1.
  PointsView increment() const;
};

CoupledTriple sample_coupled(Dimension d, std::size_t n, std::uint64_t seed,
                             std::uint64_t replicate = 0);

/// Sample only the two coupling counts (N, M) of a replicate.
std::pair<std::size_t, std::size_t> sample_coupling_counts(std::size_t n, std::uint64_t seed,
                                                           std::uint64_t replicate);

// Regions. Balls are open: B(x, r) = { y : |y - x| < r }.
struct Ball {
  std::vector<double> center;
  double radius;
};
struct Annulus {  // B(center, outer) \ B(center, inner)
  std::vector<double> center;
  double inner;
  double outer;
};
struct BallComplement {
  std::vector<double> center;
  double radius;
};
using Region = std::variant<Ball, Annulus, BallComplement>;

bool region_contains(const Region& region, std::span<const double> x);
std::size_t count_in_region(const PointsView& points, const Region& region);

/// Point dump: header "# d=<d> n=<n> seed=<seed> kind=<kind>", then one point per
/// line with whitespace-separated coordinates at 17 significant digits.
void write_cloud(std::ostream& os, const PointCloud& cloud);
PointCloud read_cloud(std::istream& is);

}  // namespace lnnd
