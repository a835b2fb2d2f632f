#pragma once

#include "lnnd/dimension.hpp"

namespace lnnd {

/// Constant A multiplying e^{-r^2/2} r^{d-1} in the radial density.
double radial_constant(Dimension d, ConstantVariant variant);
double log_radial_constant(Dimension d, ConstantVariant variant);

/// Density of ||X|| for X standard normal in R^d: A e^{-r^2/2} r^{d-1}.
/// Only the normalized variant integrates to one.
double radial_pdf(double r, Dimension d, ConstantVariant variant);

/// P[||X|| > R] = Q(d/2, R^2/2).
double radial_tail(double R, Dimension d);
double log_radial_tail(double R, Dimension d);

/// Standard Gaussian mass of the open ball B(x, r) with ||x|| = rho.
///
/// This is the noncentral chi-square distribution function with d degrees of
/// freedom and noncentrality rho^2, evaluated at r^2, expanded as a Poisson
/// mixture of central chi-square CDFs:
///
///   I(rho, r) = sum_j e^{-mu} mu^j / j! * P(d/2 + j, r^2/2),  mu = rho^2/2.
///
/// Summation starts at the dominant index and walks outward in both
/// directions; each direction stops once a geometric bound on its remaining
/// tail drops below 1e-17 of the running sum. All arithmetic is in the log
/// domain, so `log_ball_mass` is accurate for masses like e^{-800}.
double log_ball_mass(double rho, double r, Dimension d);

/// exp(log_ball_mass); underflows to 0 below ~1e-308.
double ball_mass(double rho, double r, Dimension d);

/// log(I(rho, outer) - I(rho, inner)): Gaussian mass of the annulus
/// B(x, outer) \ B(x, inner) for ||x|| = rho. -inf when inner == outer.
double log_annulus_mass(double rho, double inner, double outer, Dimension d);

}  // namespace lnnd
