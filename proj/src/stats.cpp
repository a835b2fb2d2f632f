#include "lnnd/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include <boost/math/tools/roots.hpp>

#include "lnnd/errors.hpp"
#include "lnnd/special_functions.hpp"

namespace lnnd::stats {

double mean(std::span<const double> xs) {
  if (xs.empty()) throw DomainError("mean of empty sample");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) {
  if (xs.size() < 2) throw DomainError("variance needs at least two values");
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) throw DomainError("quantile of empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile level must lie in [0, 1]");
  std::sort(xs.begin(), xs.end());
  const double h = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (h - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

double binomial_standard_error(double p, std::size_t n) {
  if (n == 0) throw DomainError("standard error with zero trials");
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw DomainError("KS statistic of empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_critical_value(std::size_t n, double alpha) {
  if (n == 0) throw DomainError("KS critical value for empty sample");
  return std::sqrt(-0.5 * std::log(0.5 * alpha)) / std::sqrt(static_cast<double>(n));
}

double chi_square_sf(double x, double dof) {
  if (x <= 0.0) return 1.0;
  return std::exp(log_gamma_q(0.5 * dof, 0.5 * x));
}

ChiSquareResult poisson_goodness_of_fit(std::span<const long long> counts, double mean) {
  if (counts.empty()) throw DomainError("goodness of fit on empty sample");
  if (!(mean > 0.0)) throw DomainError("Poisson mean must be positive");
  const double total = static_cast<double>(counts.size());
  const long long max_count = *std::max_element(counts.begin(), counts.end());
  const auto top = static_cast<std::size_t>(std::max<long long>(max_count, 0)) + 1;

  std::vector<double> observed(top + 1, 0.0);  // last cell: k >= top
  for (long long c : counts) {
    if (c < 0) throw DomainError("negative count");
    observed[static_cast<std::size_t>(c)] += 1.0;
  }
  std::vector<double> prob(top + 1, 0.0);
  double cumulative = 0.0;
  for (std::size_t k = 0; k < top; ++k) {
    prob[k] = std::exp(-mean + static_cast<double>(k) * std::log(mean) -
                       log_gamma(static_cast<double>(k) + 1.0));
    cumulative += prob[k];
  }
  prob[top] = std::max(0.0, 1.0 - cumulative);

  // Pool cells: lower tail upward, then upper tail downward.
  std::vector<double> obs_cells;
  std::vector<double> exp_cells;
  double o = 0.0;
  double e = 0.0;
  for (std::size_t k = 0; k <= top; ++k) {
    o += observed[k];
    e += prob[k] * total;
    if (e >= 5.0) {
      obs_cells.push_back(o);
      exp_cells.push_back(e);
      o = e = 0.0;
    }
  }
  if (e > 0.0 || o > 0.0) {
    if (exp_cells.empty()) {
      obs_cells.push_back(o);
      exp_cells.push_back(e);
    } else {
      obs_cells.back() += o;
      exp_cells.back() += e;
    }
  }
  ChiSquareResult r;
  for (std::size_t i = 0; i < obs_cells.size(); ++i) {
    r.statistic += (obs_cells[i] - exp_cells[i]) * (obs_cells[i] - exp_cells[i]) / exp_cells[i];
  }
  r.dof = static_cast<int>(obs_cells.size()) - 1;
  r.p_value = r.dof > 0 ? chi_square_sf(r.statistic, r.dof) : 1.0;
  return r;
}

ChiSquareResult independence_test(std::span<const long long> table, std::size_t rows,
                                  std::size_t cols) {
  if (table.size() != rows * cols || rows < 2 || cols < 2) {
    throw DomainError("independence test needs an r x c table with r, c >= 2");
  }
  std::vector<double> row_sum(rows, 0.0);
  std::vector<double> col_sum(cols, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const auto v = static_cast<double>(table[i * cols + j]);
      row_sum[i] += v;
      col_sum[j] += v;
      total += v;
    }
  }
  if (!(total > 0.0)) throw DomainError("independence test on an empty table");
  ChiSquareResult r;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double expected = row_sum[i] * col_sum[j] / total;
      if (expected > 0.0) {
        const double diff = static_cast<double>(table[i * cols + j]) - expected;
        r.statistic += diff * diff / expected;
      }
    }
  }
  r.dof = static_cast<int>((rows - 1) * (cols - 1));
  r.p_value = chi_square_sf(r.statistic, r.dof);
  return r;
}

CovarianceTest covariance_test(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw DomainError("covariance test needs two equal-length samples of size >= 2");
  }
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sxy += (x[i] - mx) * (y[i] - my);
  const double n = static_cast<double>(x.size());
  CovarianceTest t;
  t.covariance = sxy / (n - 1.0);
  t.standard_error = std::sqrt(variance(x) * variance(y) / n);
  return t;
}

double gumbel_cdf(double x, GumbelParams p) {
  return std::exp(-std::exp(-(x - p.location) / p.scale));
}

GumbelParams fit_gumbel(std::span<const double> sample) {
  if (sample.size() < 2) {
    throw DomainError("Gumbel fit needs at least 2 observations, got " +
                      std::to_string(sample.size()));
  }
  const double xmin = *std::min_element(sample.begin(), sample.end());
  const double xbar = mean(sample);
  const double sd = std::sqrt(variance(sample));
  if (!(sd > 0.0)) throw DomainError("Gumbel fit on a sample without spread");

  // Profile score for the scale: beta = xbar - sum x w / sum w, w = e^{-x/beta}.
  auto weighted = [&](double beta, double& log_mean_weight) {
    double sw = 0.0;
    double sxw = 0.0;
    for (double x : sample) {
      const double w = std::exp(-(x - xmin) / beta);
      sw += w;
      sxw += (x - xmin) * w;
    }
    log_mean_weight = std::log(sw / static_cast<double>(sample.size()));
    return xmin + sxw / sw;
  };
  auto score = [&](double beta) {
    double unused = 0.0;
    return xbar - weighted(beta, unused) - beta;
  };

  double lo = sd * 1e-3;
  double hi = sd;
  while (score(hi) > 0.0) {
    hi *= 2.0;
    if (hi > sd * 1e6) throw ConvergenceError("Gumbel scale bracket not found");
  }
  while (score(lo) < 0.0) {
    lo *= 0.5;
    if (lo < sd * 1e-12) throw ConvergenceError("Gumbel scale bracket not found");
  }
  std::uintmax_t iterations = 200;
  const auto root = boost::math::tools::toms748_solve(
      score, lo, hi, boost::math::tools::eps_tolerance<double>(50), iterations);
  if (iterations >= 200) throw ConvergenceError("Gumbel scale root search did not converge");
  const double beta = 0.5 * (root.first + root.second);
  double log_mean_weight = 0.0;
  weighted(beta, log_mean_weight);
  return {xmin - beta * log_mean_weight, beta};
}

}  // namespace lnnd::stats
