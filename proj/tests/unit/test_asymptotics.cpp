#include <doctest.h>

#include <cmath>

#include "lnnd/asymptotics.hpp"
#include "lnnd/errors.hpp"
#include "lnnd/gaussian_geometry.hpp"

using namespace lnnd;

namespace {
const Dimension kTwo(2);
const Dimension kThree(3);
bool rel_close(double a, double b, double tol) { return std::fabs(a - b) <= tol * std::fabs(b); }
}  // namespace

TEST_CASE("big_radius frozen values") {
  CHECK(rel_close(big_radius(1e4, 2.0, kTwo, ConstantVariant::paper), 4.2189199877159885, 1e-14));
  CHECK(rel_close(big_radius(1e4, 2.0, kTwo, ConstantVariant::normalized), 4.7813527747582125, 1e-14));
  CHECK(rel_close(big_radius(1e6, 2.0, kTwo, ConstantVariant::paper), 5.2745195469295579, 1e-14));
  CHECK(rel_close(big_radius(1e6, 2.0, kTwo, ConstantVariant::normalized), 5.7343356149497014, 1e-14));
  CHECK(rel_close(big_radius(std::exp(std::exp(1.0)), 0.0, kTwo, ConstantVariant::normalized),
                  2.3316439815971242, 1e-13));
  CHECK(rel_close(big_radius(1e4, -2.0, kTwo, ConstantVariant::normalized), 3.7389874473200191, 1e-14));
}

TEST_CASE("big_radius domain") {
  CHECK_THROWS_AS(big_radius(2.0, 2.0, kTwo, ConstantVariant::normalized), DomainError);
  CHECK_THROWS_WITH_AS(big_radius(2.5, 2.0, kTwo, ConstantVariant::normalized),
                       doctest::Contains("n"), DomainError);
  CHECK(big_radius_ln(std::log(1e4), 2.0, kTwo, ConstantVariant::normalized) ==
        doctest::Approx(big_radius(1e4, 2.0, kTwo, ConstantVariant::normalized)));
}

TEST_CASE("small_radius") {
  CHECK(rel_close(small_radius(1e6, 1.0), 0.70644252988479531, 1e-14));
  CHECK(rel_close(small_radius(1e6, std::sqrt(2.0)), 0.99906060680023804, 1e-14));
  CHECK(small_radius(1e6, 0.0) == 0.0);
  CHECK_THROWS_AS(small_radius(15.0, 1.0), DomainError);
}

TEST_CASE("ball_mass_asym regime and the rho squared exponent") {
  const double pts[3][2] = {{20, 0.4}, {30, 0.3}, {40, 0.25}};
  const double ratio2[3] = {1.1204224948438051, 1.0841909385283762, 1.0676553016920948};
  const double gap_rho_sq[3] = {-199.88629415828631, -449.91916596993997, -799.93453506278201};
  for (int i = 0; i < 3; ++i) {
    const double rho = pts[i][0];
    const double r = pts[i][1];
    const double le = log_ball_mass(rho, r, kTwo);
    CHECK(std::exp(log_ball_mass_asym(rho, r, kTwo, ExponentVariant::half_rho_sq) - le) ==
          doctest::Approx(ratio2[i]).epsilon(1e-10));
    CHECK(log_ball_mass_asym(rho, r, kTwo, ExponentVariant::as_printed) - le ==
          doctest::Approx(gap_rho_sq[i]).epsilon(1e-10));
  }
  CHECK(parse_exponent_variant("as_printed") == ExponentVariant::as_printed);
  CHECK_THROWS_AS(parse_exponent_variant("nope"), DomainError);
}

TEST_CASE("tail_asym tracks radial_tail") {
  for (double R : {6.0, 10.0, 20.0}) {
    const double ratio = std::exp(log_tail_asym(R, kThree, ConstantVariant::normalized) -
                                  log_radial_tail(R, kThree));
    CHECK(ratio == doctest::Approx(1.0).epsilon(2.0 / (R * R)));
  }
}

TEST_CASE("containment defect") {
  const auto c = containment_defect_asym(1e4, 2.0, kTwo, ConstantVariant::normalized);
  CHECK(rel_close(c.full, 0.10857362047581296, 1e-12));
  const auto c3 = containment_defect_asym(1e6, 4.0, kThree, ConstantVariant::normalized);
  CHECK(rel_close(c3.leading_rate, 0.0074093672204452606, 1e-12));
  // exact defect for the same radius
  const double R = big_radius(1e4, 2.0, kTwo, ConstantVariant::normalized);
  const double exact = -std::expm1(1e4 * std::log1p(-radial_tail(R, kTwo)));
  CHECK(rel_close(exact, 0.10288768226121889, 1e-12));
}

TEST_CASE("count bounds") {
  CHECK(rel_close(covering_count_bound(100.0, kTwo), 471.52924252903482, 1e-13));
  const auto p = packing_count_bound(1e6, 2.0, 1.1, kTwo, ConstantVariant::normalized);
  CHECK(rel_close(p.simplified, 5.2614643535914858, 1e-13));
  CHECK(p.ratio_form > 0.0);
}

TEST_CASE("q_m and F_m") {
  FormulaParams p;
  p.c = 2.5;
  p.u = 1.2;
  p.eps = 0.1;
  const auto q = annulus_prob_qm(20, p, ConstantVariant::normalized);
  CHECK(q.log_exact < 0.0);
  CHECK(std::isfinite(q.log_ratio()));
  p.u = 0.05;
  CHECK_THROWS_AS(annulus_prob_qm(20, p, ConstantVariant::normalized), DomainError);
  p.u = 1.2;
  CHECK_THROWS_AS(annulus_prob_qm(1, p, ConstantVariant::normalized), DomainError);
  const auto f = fm_bound(20, p, ConstantVariant::normalized);
  CHECK(f.exact >= 0.0);
  CHECK(f.exact <= 1.0);
  CHECK(scale_threshold(kTwo, 2.5) == doctest::Approx(4.5 / (2.0 * std::sqrt(2.0))));
}

TEST_CASE("E_n probability and the final series term") {
  FormulaParams p;
  p.c = 2.5;
  p.u = 1.1;
  p.eps = 0.05;
  const auto e = en_prob_model(1e4, p, ConstantVariant::normalized);
  CHECK(e.exact_form > 0.0);
  CHECK(rel_close(final_series_term(std::exp(std::exp(1.0)), 0.0, kTwo, 1.0), 0.065988035845312537, 1e-12));
  CHECK(final_series_term(1e4, 0.1, kTwo, 0.0) == 1.0);
}

TEST_CASE("regime checks") {
  FormulaParams p;
  p.c = 1.0;
  CHECK_FALSE(upper_regime_violations(p).empty());
  p.c = 3.0;
  p.u = 3.0;
  p.t = 4.0;
  CHECK(upper_regime_violations(p).empty());
  CHECK_FALSE(lower_regime_violations(p).empty());
}
