#include "lnnd/gaussian_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "lnnd/errors.hpp"
#include "lnnd/special_functions.hpp"

namespace lnnd {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// log(1e-17): relative size of a neglected tail.
constexpr double kLogTolerance = -39.14394658089878;
constexpr long kMaxTerms = 10'000'000;

}  // namespace

double log_radial_constant(Dimension d, ConstantVariant variant) {
  const double dd = d.as_double();
  if (variant == ConstantVariant::paper) {
    return -0.5 * dd * std::log(2.0 * std::numbers::pi) - std::log(dd);
  }
  return -((0.5 * dd - 1.0) * std::numbers::ln2 + log_gamma(0.5 * dd));
}

double radial_constant(Dimension d, ConstantVariant variant) {
  return std::exp(log_radial_constant(d, variant));
}

double radial_pdf(double r, Dimension d, ConstantVariant variant) {
  if (!(r >= 0.0)) throw DomainError("radial_pdf requires r >= 0");
  if (r == 0.0 || std::isinf(r)) return 0.0;
  return std::exp(log_radial_constant(d, variant) + (d.as_double() - 1.0) * std::log(r) -
                  0.5 * r * r);
}

double log_radial_tail(double R, Dimension d) {
  if (!(R >= 0.0)) throw DomainError("radial_tail requires R >= 0");
  return log_gamma_q(0.5 * d.as_double(), 0.5 * R * R);
}

double radial_tail(double R, Dimension d) { return std::exp(log_radial_tail(R, d)); }

double log_ball_mass(double rho, double r, Dimension d) {
  if (!(rho >= 0.0)) throw DomainError("ball_mass requires rho >= 0");
  if (!(r > 0.0)) throw DomainError("ball_mass requires r > 0");
  if (std::isinf(r)) return 0.0;

  const double a = 0.5 * d.as_double();
  const double x = 0.5 * r * r;
  const double mu = 0.5 * rho * rho;
  if (mu == 0.0) return log_gamma_p(a, x);

  const double log_mu = std::log(mu);
  auto log_weight = [&](long j) {
    return -mu + j * log_mu - log_gamma(static_cast<double>(j) + 1.0);
  };
  auto log_term = [&](long j) {
    return log_weight(j) + log_gamma_p(a + static_cast<double>(j), x);
  };

  // The Poisson weight peaks at j = mu; the gamma factor starts decaying like
  // x^j / Gamma(a+j+1) once j exceeds x. Their product peaks near the smaller
  // of mu and the root of j (j + a) = mu x.
  const double j_decay = 0.5 * (-a + std::sqrt(a * a + 4.0 * mu * x));
  const long start = static_cast<long>(std::floor(std::min(mu, std::max(j_decay, 0.0))));

  double log_sum = log_term(start);

  // Forward: t_{j+1} / t_j <= min(mu / (j+1), mu x / ((j+1)(a+j+1))).
  for (long j = start + 1;; ++j) {
    if (j - start > kMaxTerms) {
      throw ConvergenceError("ball_mass forward series did not converge (rho=" +
                             std::to_string(rho) + ", r=" + std::to_string(r) + ")");
    }
    const double lt = log_term(j);
    log_sum = log_add_exp(log_sum, lt);
    const double ratio =
        std::min(mu / (j + 1.0), mu * x / ((j + 1.0) * (a + j + 1.0)));
    if (ratio < 1.0) {
      const double log_tail = lt + std::log(ratio) - std::log1p(-ratio);
      if (log_tail < log_sum + kLogTolerance) break;
    }
    if (lt == kNegInf && j > mu) break;
  }

  // Backward: P(a+j, x) <= 1 and w_{j-1} / w_j = j / mu, so for j - 1 < mu the
  // remaining weights are bounded by a geometric series.
  for (long j = start - 1; j >= 0; --j) {
    const double lt = log_term(j);
    log_sum = log_add_exp(log_sum, lt);
    if (j == 0) break;
    const double ratio = j / mu;
    if (ratio < 1.0) {
      const double log_tail = log_weight(j - 1) - std::log1p(-ratio);
      if (log_tail < log_sum + kLogTolerance) break;
    }
  }
  return std::min(log_sum, 0.0);
}

double ball_mass(double rho, double r, Dimension d) { return std::exp(log_ball_mass(rho, r, d)); }

double log_annulus_mass(double rho, double inner, double outer, Dimension d) {
  if (!(inner >= 0.0) || !(outer >= inner)) {
    throw DomainError("annulus requires 0 <= inner <= outer");
  }
  if (inner == outer) return kNegInf;
  const double log_outer = log_ball_mass(rho, outer, d);
  if (inner == 0.0) return log_outer;
  return log_sub_exp(log_outer, log_ball_mass(rho, inner, d));
}

}  // namespace lnnd
