#include <doctest.h>

#include <cmath>
#include <random>

#include "lnnd/errors.hpp"
#include "lnnd/rng.hpp"
#include "lnnd/stats.hpp"

using namespace lnnd;

TEST_CASE("descriptive statistics") {
  const std::vector<double> x = {1, 2, 3, 4, 10};
  CHECK(stats::mean(x) == doctest::Approx(4.0));
  CHECK(stats::variance(x) == doctest::Approx(12.5));
  CHECK(stats::quantile(x, 0.5) == 3.0);
  CHECK(stats::quantile(x, 0.25) == 2.0);
  CHECK(stats::quantile(x, 1.0) == 10.0);
  CHECK(stats::binomial_standard_error(0.5, 100) == doctest::Approx(0.05));
}

TEST_CASE("KS statistic and critical value") {
  CHECK(stats::ks_critical_value(500, 0.01) == doctest::Approx(1.6276 / std::sqrt(500.0)).epsilon(1e-3));
  const std::vector<double> exact = {0.1, 0.3, 0.5, 0.7, 0.9};
  CHECK(stats::ks_statistic(exact, [](double t) { return t; }) == doctest::Approx(0.1));
}

TEST_CASE("chi-square survival function") {
  CHECK(stats::chi_square_sf(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(stats::chi_square_sf(2.0, 2) == doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("independence test rejects a dependent table") {
  const std::vector<long long> dependent = {90, 10, 10, 90};
  CHECK(stats::independence_test(dependent, 2, 2).p_value < 1e-6);
  const std::vector<long long> flat = {50, 50, 50, 50};
  CHECK(stats::independence_test(flat, 2, 2).p_value == doctest::Approx(1.0));
}

TEST_CASE("Gumbel maximum likelihood recovers parameters") {
  PhiloxEngine e({3, 0, StreamRole::probes}, 0);
  std::extreme_value_distribution<double> g(2.0, 0.7);
  std::vector<double> x;
  for (int i = 0; i < 20000; ++i) x.push_back(g(e));
  const auto fit = stats::fit_gumbel(x);
  CHECK(fit.location == doctest::Approx(2.0).epsilon(0.01));
  CHECK(fit.scale == doctest::Approx(0.7).epsilon(0.02));
  CHECK(stats::gumbel_cdf(2.0, fit) == doctest::Approx(std::exp(-1.0)).epsilon(0.02));
}

TEST_CASE("Gumbel fit refuses tiny or flat samples") {
  const std::vector<double> one = {1.0};
  CHECK_THROWS_AS(stats::fit_gumbel(one), DomainError);
  const std::vector<double> flat = {1.0, 1.0, 1.0};
  CHECK_THROWS_AS(stats::fit_gumbel(flat), DomainError);
}

TEST_CASE("covariance test") {
  PhiloxEngine e({4, 0, StreamRole::probes}, 0);
  std::normal_distribution<double> n;
  std::vector<double> a, b, c;
  for (int i = 0; i < 5000; ++i) {
    const double x = n(e);
    a.push_back(x);
    b.push_back(n(e));
    c.push_back(x + 0.5 * n(e));
  }
  CHECK(std::fabs(stats::covariance_test(a, b).z()) < 4.0);
  CHECK(stats::covariance_test(a, c).z() > 20.0);
}
