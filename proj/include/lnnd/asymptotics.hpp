#pragma once

// Closed-form evaluators for the growth radii, ball-mass asymptotics, annulus
// probabilities, covering/packing counts and Borel-Cantelli series terms that
// drive the strong law. Every evaluator that has an exact counterpart returns
// both so the pair can be compared along a sequence.
//
// Functions suffixed `_ln` take log(n) instead of n, which keeps subsequences
// such as n_k = 2^k finite for k in the thousands.

#include <string>
#include <vector>

#include "lnnd/dimension.hpp"

namespace lnnd {

/// Scalar knobs shared by the formulas. `C` stands in for the unnamed
/// constants (C, C_1, C_2, C_d) of the display chains.
struct FormulaParams {
  Dimension d{2};
  double c = 2.0;    // containment exponent of R_n(c)
  double t = 1.0;    // threshold scale of r_n(t)
  double u = 1.0;    // outer scale
  double eps = 0.1;  // inner scale
  double a = 2.0;    // subsequence base, nu(m) = a^m
  double C = 1.0;
};

/// (2d + c - 2) / (2 sqrt 2): the u-threshold separating summable from
/// non-summable covering series.
double scale_threshold(Dimension d, double c);

/// Conditions of the upper-envelope regime (threshold < u < t, eps + u < t)
/// that `p` violates; empty when the regime holds.
std::vector<std::string> upper_regime_violations(const FormulaParams& p);

/// Conditions of the lower-envelope regime (threshold > u > t, eps + t < u).
std::vector<std::string> lower_regime_violations(const FormulaParams& p);

/// R_n(c) = sqrt(2 log n + (c + d - 2) log log n + 2 log A). Requires n >= 3 and
/// a positive radicand; otherwise DomainError naming n.
double big_radius(double n, double c, Dimension d, ConstantVariant variant);
double big_radius_ln(double ln_n, double c, Dimension d, ConstantVariant variant);

/// r_n(t) = t log log n / sqrt(log n). Requires n >= 16.
double small_radius(double n, double t);
double small_radius_ln(double ln_n, double t);

/// Exponent in the large-rho ball-mass asymptotic. as_printed uses
/// rho^2; rho^2/2 is the one that matches the exact mass.
enum class ExponentVariant { as_printed, half_rho_sq };

const char* to_string(ExponentVariant v);
ExponentVariant parse_exponent_variant(const std::string& s);

/// (2 pi)^{-1/2} r^d exp(rho r - E) (rho r)^{-(d+1)/2}, E = rho^2 or rho^2/2.
double ball_mass_asym(double rho, double r, Dimension d, ExponentVariant v);
double log_ball_mass_asym(double rho, double r, Dimension d, ExponentVariant v);

/// A R^{d-2} e^{-R^2/2}, the large-R radial tail.
double tail_asym(double R, Dimension d, ConstantVariant variant);
double log_tail_asym(double R, Dimension d, ConstantVariant variant);

struct ContainmentDefect {
  double full;          // n A R_n(c)^{d-2} exp(-R_n(c)^2 / 2)
  double leading_rate;  // 2^{(d-2)/2} (log n)^{-c/2}; A has cancelled
};
ContainmentDefect containment_defect_asym(double n, double c, Dimension d,
                                          ConstantVariant variant);
ContainmentDefect containment_defect_asym_ln(double ln_n, double c, Dimension d,
                                             ConstantVariant variant);

struct SubsequenceRate {
  double full;   // A n_{k+1} R_{n_k}(c)^{d-2} exp(-R_{n_k}(c)^2 / 2), n_k = a^k
  double model;  // k^{-c/2}
  double ratio() const { return full / model; }
};
SubsequenceRate subsequence_rate(long k, double a, double c, Dimension d,
                                 ConstantVariant variant);

/// (m / log m)^d, the covering-number bound. Requires m >= 2.
double covering_count_bound(double m, Dimension d);

struct PackingBound {
  double ratio_form;  // (R_n(c)^d - R_n(-2)^d) / r_n(u)^d
  double simplified;  // (log n / log log n)^{d-1}
};
PackingBound packing_count_bound(double n, double c, double u, Dimension d,
                                 ConstantVariant variant);
PackingBound packing_count_bound_ln(double ln_n, double c, double u, Dimension d,
                                    ConstantVariant variant);

/// d + c/2 - 1 - u sqrt 2: the power of m in the denominator of q_m.
double qm_exponent(const FormulaParams& p);

/// Gaussian mass of the annulus B(x, r_{nu(m)}(u)) \ B(x, r_{nu(m)}(eps)) at
/// ||x|| = R_{nu(m+1)}(c), and its closed-form model
/// (log m)^{(d-1)/2} / (a^{m+1} m^{qm_exponent}).
struct AnnulusProbability {
  double log_exact;
  double log_model;

  /// Linear values; throw UnderflowError when a positive value is not
  /// representable as a double.
  double exact() const;
  double model() const;
  double log_ratio() const { return log_exact - log_model; }
};
AnnulusProbability annulus_prob_qm(long m, const FormulaParams& p, ConstantVariant variant);

struct FmBound {
  double exact;       // exp(-nu(m) q_m) with the exact q_m
  double simplified;  // exp(-C (log m)^{(d-1)/2} / m^{qm_exponent})
};
FmBound fm_bound(long m, const FormulaParams& p, ConstantVariant variant);
/// The simplified term alone; cheap and never calls ball_mass.
double fm_bound_simplified(long m, const FormulaParams& p);

/// Probability of the isolation event at a probe.
struct EnProbability {
  double model;  // (log log n)^{(d-1)/2} / (log n)^{d - 2 - eps sqrt 2}
  /// (n - n^{3/4}) I(R_n(-2), r_n(eps)) exp(-(n + n^{3/4}) I(R_n(c), r_n(u)))
  double exact_form;
  double log_exact_form;
  /// (n + n^{3/4}) I(R_n(c), r_n(u)); the exponential factor is exp(-this).
  double outer_exponent;
};
EnProbability en_prob_model(double n, const FormulaParams& p, ConstantVariant variant);

/// exp(-C2 (log n)^{eps sqrt 2 + 1} / (log log n)^{(d-1)/2}).
double final_series_term(double n, double eps, Dimension d, double C2);
double final_series_term_ln(double ln_n, double eps, Dimension d, double C2);

}  // namespace lnnd
