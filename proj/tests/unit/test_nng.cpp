#include <doctest.h>

#include <cmath>

#include "lnnd/errors.hpp"
#include "lnnd/kdtree.hpp"
#include "lnnd/nng.hpp"
#include "lnnd/point_process.hpp"

using namespace lnnd;

TEST_CASE("fast and brute engines agree") {
  for (int dim : {2, 3, 5, 8}) {
    for (std::size_t n : {2u, 3u, 17u, 500u, 3000u}) {
      const auto cloud = sample_cloud(Dimension(dim), n, 77, n);
      CAPTURE(dim);
      CAPTURE(n);
      CHECK(build_nng_fast(cloud.view()) == build_nng_brute(cloud.view()));
    }
  }
}

TEST_CASE("ties resolve to the smallest index") {
  // Square: every vertex has two neighbors at distance 1.
  const std::vector<double> sq = {0, 0, 1, 0, 0, 1, 1, 1};
  const PointsView v(Dimension(2), sq);
  const auto fast = build_nng_fast(v);
  CHECK(fast == build_nng_brute(v));
  CHECK(fast.nn_index == std::vector<std::size_t>{1, 0, 0, 1});
  CHECK(fast.d_n == 1.0);
}

TEST_CASE("duplicate points") {
  std::vector<double> pts = {0, 0, 0, 0, 3, 0, 3, 0, 3, 0};
  const PointsView v(Dimension(2), pts);
  const auto r = build_nng_fast(v);
  CHECK(r == build_nng_brute(v));
  CHECK(r.d_n == 0.0);
  CHECK(r.nn_index[0] == 1);
  CHECK(r.nn_index[2] == 3);
}

TEST_CASE("a large grid of duplicates") {
  std::vector<double> pts;
  for (int i = 0; i < 400; ++i) {
    pts.push_back(static_cast<double>(i % 5));
    pts.push_back(static_cast<double>((i / 5) % 4));
  }
  const PointsView v(Dimension(2), pts);
  CHECK(build_nng_fast(v) == build_nng_brute(v));
}

TEST_CASE("scale equivariance and translation invariance") {
  auto cloud = sample_cloud(Dimension(3), 2000, 4);
  const double base = lnnd::lnnd(cloud.view());
  auto scaled = cloud.coords;
  for (double& x : scaled) x *= 4.0;  // exact in binary
  CHECK(lnnd::lnnd(PointsView(Dimension(3), scaled)) == 4.0 * base);
  auto shifted = cloud.coords;
  for (std::size_t i = 0; i < shifted.size(); i += 3) shifted[i] += 0.5;
  CHECK(lnnd::lnnd(PointsView(Dimension(3), shifted)) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("adding points never increases existing nearest-neighbor distances") {
  const auto cloud = sample_cloud(Dimension(2), 3000, 6);
  const auto small = build_nng_fast(cloud.view().prefix(1000));
  const auto large = build_nng_fast(cloud.view());
  for (std::size_t i = 0; i < 1000; ++i) CHECK(large.nn_dist[i] <= small.nn_dist[i]);
}

TEST_CASE("the graph is directed") {
  // 0 -> 1, 1 -> 2, 2 -> 1
  const std::vector<double> pts = {0, 0, 3, 0, 4, 0};
  const auto r = build_nng_brute(PointsView(Dimension(2), pts));
  CHECK(r.nn_index == std::vector<std::size_t>{1, 2, 1});
  CHECK(r.nn_dist == std::vector<double>{3, 1, 1});
  CHECK(r.d_n == 3.0);
}

TEST_CASE("fewer than two points") {
  const std::vector<double> one = {1, 2};
  CHECK_THROWS_AS(build_nng_fast(PointsView(Dimension(2), one)), DomainError);
  CHECK_THROWS_AS(build_nng_brute(PointsView(Dimension(2), one)), DomainError);
}

TEST_CASE("restricted LNND uses full-cloud neighbors") {
  // Annulus 1 <= |x| < 2 holds points 1 and 2. Point 1's neighbor is point 0
  // (outside the annulus) at distance 0.5; point 2's is point 3 at 1.0.
  const std::vector<double> pts = {0.7, 0, 1.2, 0, 0, 1.5, 0, 2.5};
  const PointsView v(Dimension(2), pts);
  const AnnulusSpec annulus(1.0, 2.0);
  const auto r = lnnd_restricted(v, annulus);
  REQUIRE(r.has_value());
  CHECK(*r == doctest::Approx(1.0));
  CHECK_FALSE(lnnd_restricted(v, AnnulusSpec(3.0, 4.0)).has_value());
  CHECK_THROWS_AS(AnnulusSpec(2.0, 1.0), DomainError);
  CHECK_THROWS_AS(AnnulusSpec(-1.0, 1.0), DomainError);
}

TEST_CASE("vacancy event") {
  const std::vector<double> pts = {0, 0, 2, 0};
  const PointsView v(Dimension(2), pts);
  const std::vector<double> c = {1.0, 0.0};
  CHECK(vacancy_event(v, c, 0.0, 0.9));
  CHECK_FALSE(vacancy_event(v, c, 0.0, 1.1));
  CHECK(vacancy_event(v, c, 1.1, 2.0));
}

TEST_CASE("kd tree query excludes the given index") {
  const auto cloud = sample_cloud(Dimension(2), 1000, 1);
  const KdTree tree(cloud.view());
  const auto p = cloud.view().point(10);
  const auto nb = tree.nearest_other(p, 10);
  CHECK(nb.index != 10);
  const auto self = tree.nearest_other(p, KdTree::npos);
  CHECK(self.index == 10);
  CHECK(self.squared_distance == 0.0);
}
