#include "lnnd/asymptotics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "lnnd/errors.hpp"
#include "lnnd/gaussian_geometry.hpp"

namespace lnnd {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kLogMinNormal = std::log(std::numeric_limits<double>::min());
const double kLog16 = std::log(16.0);

std::string real(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

double checked_exp(double log_value, const char* what) {
  if (log_value != kNegInf && log_value < kLogMinNormal) {
    throw UnderflowError(std::string(what) + " underflows double range (log value " +
                         real(log_value) + ")");
  }
  return std::exp(log_value);
}

}  // namespace

double scale_threshold(Dimension d, double c) {
  return (2.0 * d.as_double() + c - 2.0) / (2.0 * std::numbers::sqrt2);
}

std::vector<std::string> upper_regime_violations(const FormulaParams& p) {
  std::vector<std::string> out;
  const double thr = scale_threshold(p.d, p.c);
  if (!(thr < p.u)) out.push_back("need (2d+c-2)/(2 sqrt 2) = " + real(thr) + " < u");
  if (!(p.u < p.t)) out.push_back("need u < t");
  if (!(p.eps > 0.0)) out.push_back("need eps > 0");
  if (!(p.eps + p.u < p.t)) out.push_back("need eps + u < t");
  if (!(p.a > 1.0)) out.push_back("need a > 1");
  return out;
}

std::vector<std::string> lower_regime_violations(const FormulaParams& p) {
  std::vector<std::string> out;
  const double thr = scale_threshold(p.d, p.c);
  if (!(thr > p.u)) out.push_back("need (2d+c-2)/(2 sqrt 2) = " + real(thr) + " > u");
  if (!(p.u > p.t)) out.push_back("need u > t");
  if (!(p.eps > 0.0)) out.push_back("need eps > 0");
  if (!(p.eps + p.t < p.u)) out.push_back("need eps + t < u");
  return out;
}

double big_radius_ln(double ln_n, double c, Dimension d, ConstantVariant variant) {
  if (!(ln_n >= std::log(3.0))) {
    throw DomainError("big_radius requires n >= 3, got n = e^" + real(ln_n));
  }
  const double radicand = 2.0 * ln_n + (c + d.as_double() - 2.0) * std::log(ln_n) +
                          2.0 * log_radial_constant(d, variant);
  if (!(radicand > 0.0)) {
    throw DomainError("big_radius radicand " + real(radicand) + " <= 0 at n = " +
                      real(std::exp(ln_n)) + " (c=" + real(c) + ")");
  }
  return std::sqrt(radicand);
}

double big_radius(double n, double c, Dimension d, ConstantVariant variant) {
  if (!(n >= 3.0)) throw DomainError("big_radius requires n >= 3, got n = " + real(n));
  return big_radius_ln(std::log(n), c, d, variant);
}

double small_radius_ln(double ln_n, double t) {
  if (!(ln_n >= kLog16 * (1.0 - 1e-15))) {
    throw DomainError("small_radius requires n >= 16, got n = " + real(std::exp(ln_n)));
  }
  return t * std::log(ln_n) / std::sqrt(ln_n);
}

double small_radius(double n, double t) {
  if (!(n >= 16.0)) throw DomainError("small_radius requires n >= 16, got n = " + real(n));
  return small_radius_ln(std::log(n), t);
}

const char* to_string(ExponentVariant v) {
  return v == ExponentVariant::as_printed ? "as_printed" : "half_rho_sq";
}

ExponentVariant parse_exponent_variant(const std::string& s) {
  if (s == "as_printed") return ExponentVariant::as_printed;
  if (s == "half_rho_sq") return ExponentVariant::half_rho_sq;
  throw DomainError("unknown exponent variant '" + s + "' (expected as_printed|half_rho_sq)");
}

double log_ball_mass_asym(double rho, double r, Dimension d, ExponentVariant v) {
  if (!(rho > 0.0) || !(r > 0.0)) throw DomainError("ball_mass_asym requires rho, r > 0");
  const double dd = d.as_double();
  const double e = v == ExponentVariant::as_printed ? rho * rho : 0.5 * rho * rho;
  return -0.5 * std::log(2.0 * std::numbers::pi) + dd * std::log(r) + rho * r - e -
         0.5 * (dd + 1.0) * std::log(rho * r);
}

double ball_mass_asym(double rho, double r, Dimension d, ExponentVariant v) {
  return std::exp(log_ball_mass_asym(rho, r, d, v));
}

double log_tail_asym(double R, Dimension d, ConstantVariant variant) {
  if (!(R > 0.0)) throw DomainError("tail_asym requires R > 0");
  return log_radial_constant(d, variant) + (d.as_double() - 2.0) * std::log(R) - 0.5 * R * R;
}

double tail_asym(double R, Dimension d, ConstantVariant variant) {
  return std::exp(log_tail_asym(R, d, variant));
}

ContainmentDefect containment_defect_asym_ln(double ln_n, double c, Dimension d,
                                             ConstantVariant variant) {
  const double R = big_radius_ln(ln_n, c, d, variant);
  const double dd = d.as_double();
  return {std::exp(ln_n + log_tail_asym(R, d, variant)),
          std::exp(0.5 * (dd - 2.0) * std::numbers::ln2 - 0.5 * c * std::log(ln_n))};
}

ContainmentDefect containment_defect_asym(double n, double c, Dimension d,
                                          ConstantVariant variant) {
  if (!(n >= 3.0)) throw DomainError("containment_defect_asym requires n >= 3");
  return containment_defect_asym_ln(std::log(n), c, d, variant);
}

SubsequenceRate subsequence_rate(long k, double a, double c, Dimension d,
                                 ConstantVariant variant) {
  if (k < 1) throw DomainError("subsequence_rate requires k >= 1");
  if (!(a > 1.0)) throw DomainError("subsequence_rate requires a > 1");
  const double ln_a = std::log(a);
  const double ln_nk = static_cast<double>(k) * ln_a;
  const double R = big_radius_ln(ln_nk, c, d, variant);
  const double log_full = log_radial_constant(d, variant) + ln_nk + ln_a +
                          (d.as_double() - 2.0) * std::log(R) - 0.5 * R * R;
  return {std::exp(log_full), std::pow(static_cast<double>(k), -0.5 * c)};
}

double covering_count_bound(double m, Dimension d) {
  if (!(m >= 2.0)) throw DomainError("covering_count_bound requires m >= 2");
  return std::pow(m / std::log(m), d.value());
}

PackingBound packing_count_bound_ln(double ln_n, double c, double u, Dimension d,
                                    ConstantVariant variant) {
  if (!(u > 0.0)) throw DomainError("packing_count_bound requires u > 0");
  const int dim = d.value();
  const double outer = big_radius_ln(ln_n, c, d, variant);
  const double inner = big_radius_ln(ln_n, -2.0, d, variant);
  const double r = small_radius_ln(ln_n, u);
  return {(std::pow(outer, dim) - std::pow(inner, dim)) / std::pow(r, dim),
          std::pow(ln_n / std::log(ln_n), dim - 1)};
}

PackingBound packing_count_bound(double n, double c, double u, Dimension d,
                                 ConstantVariant variant) {
  if (!(n >= 16.0)) throw DomainError("packing_count_bound requires n >= 16");
  return packing_count_bound_ln(std::log(n), c, u, d, variant);
}

double qm_exponent(const FormulaParams& p) {
  return p.d.as_double() + 0.5 * p.c - 1.0 - p.u * std::numbers::sqrt2;
}

double AnnulusProbability::exact() const { return checked_exp(log_exact, "q_m (exact)"); }
double AnnulusProbability::model() const { return checked_exp(log_model, "q_m (model)"); }

AnnulusProbability annulus_prob_qm(long m, const FormulaParams& p, ConstantVariant variant) {
  if (m < 2) throw DomainError("annulus_prob_qm requires m >= 2");
  if (!(p.a > 1.0)) throw DomainError("annulus_prob_qm requires a > 1");
  if (!(p.eps > 0.0) || p.u < p.eps) {
    throw DomainError("annulus_prob_qm requires u >= eps > 0");
  }
  const double ln_a = std::log(p.a);
  const double md = static_cast<double>(m);
  const double rho = big_radius_ln((md + 1.0) * ln_a, p.c, p.d, variant);
  const double outer = small_radius_ln(md * ln_a, p.u);
  const double inner = small_radius_ln(md * ln_a, p.eps);
  const double log_exact = log_annulus_mass(rho, inner, outer, p.d);
  const double log_m = std::log(md);
  const double log_model = 0.5 * (p.d.as_double() - 1.0) * std::log(log_m) -
                           (md + 1.0) * ln_a - qm_exponent(p) * log_m;
  return {log_exact, log_model};
}

double fm_bound_simplified(long m, const FormulaParams& p) {
  if (m < 2) throw DomainError("fm_bound requires m >= 2");
  const double md = static_cast<double>(m);
  const double log_m = std::log(md);
  return std::exp(-p.C * std::exp(0.5 * (p.d.as_double() - 1.0) * std::log(log_m) -
                                  qm_exponent(p) * log_m));
}

FmBound fm_bound(long m, const FormulaParams& p, ConstantVariant variant) {
  const AnnulusProbability q = annulus_prob_qm(m, p, variant);
  const double exponent = static_cast<double>(m) * std::log(p.a) + q.log_exact;
  return {std::exp(-std::exp(exponent)), fm_bound_simplified(m, p)};
}

EnProbability en_prob_model(double n, const FormulaParams& p, ConstantVariant variant) {
  if (!(n >= 16.0)) throw DomainError("en_prob_model requires n >= 16");
  const double ln_n = std::log(n);
  const double ln2_n = std::log(ln_n);
  const double dd = p.d.as_double();
  EnProbability out{};
  out.model = std::exp(0.5 * (dd - 1.0) * std::log(ln2_n) -
                       (dd - 2.0 - p.eps * std::numbers::sqrt2) * std::log(ln_n));

  const double n34 = std::pow(n, 0.75);
  const double inner_rho = big_radius_ln(ln_n, -2.0, p.d, variant);
  const double outer_rho = big_radius_ln(ln_n, p.c, p.d, variant);
  const double log_hit = log_ball_mass(inner_rho, small_radius_ln(ln_n, p.eps), p.d);
  out.outer_exponent = (n + n34) * ball_mass(outer_rho, small_radius_ln(ln_n, p.u), p.d);
  out.log_exact_form = std::log(n - n34) + log_hit - out.outer_exponent;
  out.exact_form = std::exp(out.log_exact_form);
  return out;
}

double final_series_term_ln(double ln_n, double eps, Dimension d, double C2) {
  const double ln2_n = std::log(ln_n);
  if (!(ln2_n >= 0.0)) throw DomainError("final_series_term requires n >= e");
  if (C2 == 0.0) return 1.0;
  return std::exp(-C2 * std::exp((eps * std::numbers::sqrt2 + 1.0) * std::log(ln_n) -
                                 0.5 * (d.as_double() - 1.0) * std::log(ln2_n)));
}

double final_series_term(double n, double eps, Dimension d, double C2) {
  if (!(n > 1.0)) throw DomainError("final_series_term requires n >= e");
  return final_series_term_ln(std::log(n), eps, d, C2);
}

}  // namespace lnnd
