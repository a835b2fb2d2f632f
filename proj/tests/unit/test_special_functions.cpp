#include <doctest.h>

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>

#include "lnnd/errors.hpp"
#include "lnnd/special_functions.hpp"

using namespace lnnd;

TEST_CASE("regularized incomplete gamma matches boost") {
  for (double a : {0.5, 1.0, 1.5, 2.5, 5.0, 25.0, 100.0}) {
    for (double x : {1e-3, 0.1, 0.9, 1.0, 3.0, 10.0, 40.0, 120.0}) {
      const double p = boost::math::gamma_p(a, x);
      const double q = boost::math::gamma_q(a, x);
      CAPTURE(a);
      CAPTURE(x);
      if (p > 1e-300) CHECK(std::exp(log_gamma_p(a, x)) == doctest::Approx(p).epsilon(1e-13));
      if (q > 1e-300) CHECK(std::exp(log_gamma_q(a, x)) == doctest::Approx(q).epsilon(1e-13));
    }
  }
}

TEST_CASE("log domain survives where linear underflows") {
  // Q(1, x) = e^{-x}
  CHECK(log_gamma_q(1.0, 2000.0) == doctest::Approx(-2000.0).epsilon(1e-14));
  // P(1, x) = 1 - e^{-x} ~ x for tiny x
  CHECK(log_gamma_p(1.0, 1e-200) == doctest::Approx(std::log(1e-200)).epsilon(1e-14));
}

TEST_CASE("log_add_exp and log_sub_exp") {
  CHECK(log_add_exp(std::log(2.0), std::log(3.0)) == doctest::Approx(std::log(5.0)));
  CHECK(log_sub_exp(std::log(5.0), std::log(3.0)) == doctest::Approx(std::log(2.0)));
  CHECK(log_add_exp(-INFINITY, 1.0) == 1.0);
  CHECK(log_add_exp(-1000.0, -1000.0) == doctest::Approx(-1000.0 + std::log(2.0)));
}

TEST_CASE("log_gamma") {
  CHECK(log_gamma(5.0) == doctest::Approx(std::log(24.0)));
  CHECK(log_gamma(0.5) == doctest::Approx(0.5 * std::log(M_PI)));
}
