#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace lnnd::stats {

double mean(std::span<const double> xs);
/// Unbiased sample variance.
double variance(std::span<const double> xs);
/// Linear-interpolation quantile (Hyndman-Fan type 7) of an unsorted sample.
double quantile(std::vector<double> xs, double q);

/// sqrt(p (1 - p) / n).
double binomial_standard_error(double p, std::size_t n);

/// sup_x |F_n(x) - F(x)| of a sample against a continuous CDF.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);
/// Asymptotic one-sample critical value sqrt(-log(alpha / 2) / 2) / sqrt(n).
double ks_critical_value(std::size_t n, double alpha);

/// P[chi^2_dof > x].
double chi_square_sf(double x, double dof);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

/// Goodness of fit of nonnegative integer counts to Poisson(mean). Cells are
/// pooled from both ends until every expected count is at least 5.
ChiSquareResult poisson_goodness_of_fit(std::span<const long long> counts, double mean);

/// Pearson test of independence on an r x c contingency table (row-major).
ChiSquareResult independence_test(std::span<const long long> table, std::size_t rows,
                                  std::size_t cols);

struct CovarianceTest {
  double covariance = 0.0;
  double standard_error = 0.0;  // sqrt(var_x var_y / n) under independence
  double z() const { return standard_error > 0.0 ? covariance / standard_error : 0.0; }
};
CovarianceTest covariance_test(std::span<const double> x, std::span<const double> y);

struct GumbelParams {
  double location = 0.0;
  double scale = 1.0;
};

/// exp(-exp(-(x - location) / scale)).
double gumbel_cdf(double x, GumbelParams p = {});

/// Maximum-likelihood location/scale fit. Throws DomainError for fewer than
/// two observations or a sample without spread.
GumbelParams fit_gumbel(std::span<const double> sample);

}  // namespace lnnd::stats
