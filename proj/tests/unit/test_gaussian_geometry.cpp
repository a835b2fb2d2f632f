#include <doctest.h>

#include <cmath>

#include "lnnd/errors.hpp"
#include "lnnd/gaussian_geometry.hpp"

using namespace lnnd;

namespace {
bool rel_close(double a, double b, double tol) { return std::fabs(a - b) <= tol * std::fabs(b); }
}  // namespace

TEST_CASE("radial constants") {
  const Dimension two(2);
  CHECK(radial_constant(two, ConstantVariant::normalized) == doctest::Approx(1.0));
  CHECK(radial_constant(two, ConstantVariant::paper) == doctest::Approx(1.0 / (4.0 * M_PI)));
  // chi_3 density constant sqrt(2/pi)
  CHECK(radial_constant(Dimension(3), ConstantVariant::normalized) ==
        doctest::Approx(std::sqrt(2.0 / M_PI)));
  CHECK_THROWS_AS(Dimension(1), DomainError);
}

TEST_CASE("radial_tail frozen values") {
  CHECK(rel_close(radial_tail(2.0, Dimension(2)), 0.13533528323661269, 1e-13));
  CHECK(rel_close(radial_tail(3.0, Dimension(3)), 0.029290886534888232, 1e-13));
  CHECK(rel_close(radial_tail(8.0, Dimension(10)), 6.2937103529333325e-10, 1e-12));
  CHECK(rel_close(radial_tail(15.0, Dimension(50)), 4.7834640219576629e-24, 1e-11));
  CHECK(radial_tail(0.5, Dimension(50)) == doctest::Approx(1.0));
  CHECK(radial_tail(0.0, Dimension(3)) == 1.0);
  CHECK_THROWS_AS(radial_tail(-1.0, Dimension(2)), DomainError);
}

TEST_CASE("radial_tail is decreasing in R") {
  for (int d : {2, 3, 7}) {
    double prev = 1.0;
    for (double R = 0.1; R < 12.0; R += 0.1) {
      const double t = radial_tail(R, Dimension(d));
      CHECK(t <= prev);
      prev = t;
    }
  }
}

TEST_CASE("ball_mass frozen values") {
  CHECK(rel_close(ball_mass(0.0, 1.0, Dimension(2)), 0.39346934028736658, 1e-13));
  CHECK(rel_close(ball_mass(1.0, 1.0, Dimension(2)), 0.26712019620317978, 1e-12));
  CHECK(rel_close(ball_mass(2.5, 0.7, Dimension(3)), 0.0046167531352382293, 1e-12));
  CHECK(rel_close(ball_mass(5.0, 0.5, Dimension(2)), 8.7127401858685935e-7, 1e-12));
  CHECK(rel_close(ball_mass(3.0, 2.0, Dimension(5)), 0.03318877580473786, 1e-12));
}

TEST_CASE("log_ball_mass deep in the tail") {
  CHECK(log_ball_mass(20.0, 0.4, Dimension(2)) == doctest::Approx(-197.98438815118643).epsilon(1e-13));
  CHECK(log_ball_mass(40.0, 0.25, Dimension(2)) == doctest::Approx(-797.21086983215351).epsilon(1e-13));
  CHECK(log_ball_mass(30.0, 0.3, Dimension(3)) == doctest::Approx(-450.08014769141593).epsilon(1e-13));
  CHECK(log_ball_mass(40.0, 0.25, Dimension(3)) == doctest::Approx(-799.81452247824245).epsilon(1e-13));
}

TEST_CASE("ball_mass limits and monotonicity") {
  const Dimension d(3);
  CHECK_THROWS_AS(ball_mass(1.0, 0.0, d), DomainError);
  CHECK(ball_mass(0.0, 2.0, d) == doctest::Approx(1.0 - radial_tail(2.0, d)));
  CHECK(ball_mass(1.0, 60.0, d) == doctest::Approx(1.0));
  double prev = 0.0;
  for (double r = 0.05; r < 4.0; r += 0.05) {
    const double m = ball_mass(1.5, r, d);
    CHECK(m >= prev);
    prev = m;
  }
  prev = 1.0;
  for (double rho = 0.0; rho < 8.0; rho += 0.25) {
    const double m = ball_mass(rho, 0.5, d);
    CHECK(m <= prev);
    prev = m;
  }
}

TEST_CASE("annulus mass is a difference of balls") {
  const Dimension d(2);
  const double expect = ball_mass(2.0, 0.9, d) - ball_mass(2.0, 0.3, d);
  CHECK(std::exp(log_annulus_mass(2.0, 0.3, 0.9, d)) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(std::exp(log_annulus_mass(2.0, 0.0, 0.9, d)) == doctest::Approx(ball_mass(2.0, 0.9, d)));
}
