#pragma once

namespace lnnd {

/// log Gamma(x) for x > 0. Reentrant (does not touch the global `signgam`).
double log_gamma(double x);

/// Natural log of the regularized lower incomplete gamma P(a, x).
///
/// Evaluated entirely in the log domain, so results far below the smallest
/// double (P(a, x) ~ 1e-400 and beyond) stay accurate. Uses the power series
/// for x < a + 1 and the Legendre continued fraction for the complement
/// otherwise. Throws ConvergenceError if neither meets machine tolerance.
double log_gamma_p(double a, double x);

/// Natural log of the regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double log_gamma_q(double a, double x);

/// log(e^a + e^b) without overflow.
double log_add_exp(double a, double b) noexcept;

/// log(e^a - e^b) for a >= b; returns -inf when a == b.
double log_sub_exp(double a, double b) noexcept;

}  // namespace lnnd
