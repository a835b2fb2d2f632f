#include "lnnd/special_functions.hpp"

#include <cmath>
#include <limits>
#include <math.h>
#include <string>

#include "lnnd/errors.hpp"

namespace lnnd {

namespace {

constexpr int kMaxIterations = 1'000'000;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = std::numeric_limits<double>::min() / kEps;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string args(double a, double x) {
  return "(a=" + std::to_string(a) + ", x=" + std::to_string(x) + ")";
}

// log P(a, x) by the series x^a e^{-x} / Gamma(a+1) * sum_k x^k / ((a+1)...(a+k)).
double log_p_series(double a, double x) {
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < kMaxIterations; ++k) {
    term *= x / (a + k);
    sum += term;
    if (term < sum * kEps * 0.5) {
      return a * std::log(x) - x - log_gamma(a + 1.0) + std::log(sum);
    }
  }
  throw ConvergenceError("incomplete gamma series did not converge " + args(a, x));
}

// log Q(a, x) by the modified Lentz evaluation of the continued fraction.
double log_q_continued_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) {
      return a * std::log(x) - x - log_gamma(a) + std::log(h);
    }
  }
  throw ConvergenceError("incomplete gamma continued fraction did not converge " +
                         args(a, x));
}

// log(1 - e^v) for v <= 0.
double log1m_exp(double v) {
  if (v > -0.6931471805599453) return std::log(-std::expm1(v));
  return std::log1p(-std::exp(v));
}

void check_args(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0) || std::isnan(x)) {
    throw DomainError("incomplete gamma requires a > 0 and x >= 0 " + args(a, x));
  }
}

}  // namespace

double log_gamma(double x) {
  int sign = 0;
  return ::lgamma_r(x, &sign);
}

double log_gamma_p(double a, double x) {
  check_args(a, x);
  if (x == 0.0) return kNegInf;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return log_p_series(a, x);
  return log1m_exp(log_q_continued_fraction(a, x));
}

double log_gamma_q(double a, double x) {
  check_args(a, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return kNegInf;
  if (x < a + 1.0) return log1m_exp(log_p_series(a, x));
  return log_q_continued_fraction(a, x);
}

double log_add_exp(double a, double b) noexcept {
  if (a < b) std::swap(a, b);
  if (b == kNegInf) return a;
  return a + std::log1p(std::exp(b - a));
}

double log_sub_exp(double a, double b) noexcept {
  if (b == kNegInf) return a;
  if (a == b) return kNegInf;
  return a + log1m_exp(b - a);
}

}  // namespace lnnd
