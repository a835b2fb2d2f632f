#include "lnnd/validation.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <numbers>
#include <random>

#include "lnnd/experiments.hpp"
#include "lnnd/gaussian_geometry.hpp"
#include "lnnd/rng.hpp"
#include "parallel.hpp"

namespace lnnd::validation {

namespace {

std::string fmt(const char* format, ...) {
  char buf[1024];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

template <class Body>
CriterionResult timed(int id, const char* name, Body&& body) {
  CriterionResult r;
  r.id = id;
  r.name = name;
  const auto t0 = std::chrono::steady_clock::now();
  body(r);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace

CriterionResult special_functions(const Settings& s) {
  return timed(1, "radial_tail vs quadrature", [&](CriterionResult& r) {
    boost::math::quadrature::exp_sinh<double> integrator;
    double worst = 0.0;
    std::string where;
    for (int dim : {2, 3, 5, 10}) {
      const Dimension d(dim);
      for (double R : {0.5, 1.0, 2.0, 5.0, 8.0}) {
        auto pdf = [&](double x) { return radial_pdf(R + x, d, ConstantVariant::normalized); };
        const double quad = integrator.integrate(pdf, 1e-14);
        const double rel = std::fabs(radial_tail(R, d) - quad) / quad;
        if (rel > worst) {
          worst = rel;
          where = fmt("d=%d R=%g", dim, R);
        }
      }
    }
    r.passed = worst <= s.tail_rel_tol;
    r.detail = fmt("max relative error %.3g at %s (tol %g)", worst, where.c_str(), s.tail_rel_tol);
  });
}

CriterionResult ball_mass_monte_carlo(const Settings& s) {
  return timed(2, "ball_mass vs Monte Carlo", [&](CriterionResult& r) {
    const double rhos[] = {0.0, 0.5, 1.0, 2.0, 3.0};
    const double radii[] = {0.25, 0.5, 1.0, 1.5, 2.0};
    struct Case {
      int d;
      double rho, radius, exact, empirical, z;
    };
    std::vector<Case> cases;
    for (int d : {2, 3})
      for (double rho : rhos)
        for (double rad : radii) cases.push_back({d, rho, rad, 0, 0, 0});
    detail::parallel_for_each(cases.size(), [&](std::size_t i) {
      Case& c = cases[i];
      c.exact = ball_mass(c.rho, c.radius, Dimension(c.d));
      PhiloxEngine engine({s.seed, i, StreamRole::probes}, 0);
      std::normal_distribution<double> normal;
      const double r2 = c.radius * c.radius;
      std::size_t hits = 0;
      for (std::size_t k = 0; k < s.ballmass_samples; ++k) {
        const double x0 = normal(engine) - c.rho;
        double q = x0 * x0;
        for (int j = 1; j < c.d; ++j) {
          const double x = normal(engine);
          q += x * x;
        }
        if (q < r2) ++hits;
      }
      c.empirical = static_cast<double>(hits) / static_cast<double>(s.ballmass_samples);
      c.z = (c.empirical - c.exact) / stats::binomial_standard_error(c.exact, s.ballmass_samples);
    });
    const auto worst = std::max_element(cases.begin(), cases.end(), [](const Case& a, const Case& b) {
      return std::fabs(a.z) < std::fabs(b.z);
    });
    r.passed = std::fabs(worst->z) <= s.ballmass_sigma;
    r.detail = fmt("%zu cases x %zu samples; max |z| %.2f at d=%d rho=%g r=%g (tol %g sigma)",
                   cases.size(), s.ballmass_samples, std::fabs(worst->z), worst->d, worst->rho,
                   worst->radius, s.ballmass_sigma);
  });
}

CriterionResult ball_mass_asym_regime(const Settings& s) {
  return timed(3, "ball_mass_asym regime", [&](CriterionResult& r) {
    const double pts[3][2] = {{20, 0.4}, {30, 0.3}, {40, 0.25}};
    double lo = 1e300, hi = -1e300, min_gap = 1e300;
    for (int dim : {2, 3}) {
      const Dimension d(dim);
      for (const auto& p : pts) {
        const double log_exact = log_ball_mass(p[0], p[1], d);
        const double ratio =
            std::exp(log_ball_mass_asym(p[0], p[1], d, ExponentVariant::half_rho_sq) - log_exact);
        const double gap =
            std::fabs(log_ball_mass_asym(p[0], p[1], d, ExponentVariant::as_printed) - log_exact);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        min_gap = std::min(min_gap, gap);
      }
    }
    r.passed = lo >= s.asym_ratio_lo && hi <= s.asym_ratio_hi && min_gap > s.exponent_gap_log;
    r.detail = fmt("half_rho_sq ratio in [%.4f, %.4f] (need [%g, %g]); as_printed min |log ratio| %.1f (need > %g)",
                   lo, hi, s.asym_ratio_lo, s.asym_ratio_hi, min_gap, s.exponent_gap_log);
  });
}

CriterionResult engine_equivalence(const Settings& s) {
  return timed(4, "fast engine equals brute force", [&](CriterionResult& r) {
    const int dims[] = {2, 3, 5};
    std::size_t mismatches = 0;
    std::size_t largest = 0;
    std::size_t duplicated = 0;
    for (std::size_t i = 0; i < s.engine_instances; ++i) {
      PhiloxEngine engine({s.seed, i, StreamRole::probes}, 0);
      const auto n = std::uniform_int_distribution<std::size_t>(2, 2000)(engine);
      const Dimension d(dims[i % 3]);
      auto cloud = sample_cloud(d, n, s.seed, i);
      if (i % 5 == 0) {
        // Exact duplicates exercise tie handling.
        const auto dim = static_cast<std::size_t>(d.value());
        for (std::size_t j = 1; j < n; j += 7) {
          std::copy_n(cloud.coords.begin() + static_cast<long>((j - 1) * dim), dim,
                      cloud.coords.begin() + static_cast<long>(j * dim));
        }
        ++duplicated;
      }
      largest = std::max(largest, n);
      if (!(build_nng_fast(cloud.view()) == build_nng_brute(cloud.view()))) ++mismatches;
    }
    r.passed = mismatches == 0;
    r.detail = fmt("%zu instances (%zu with duplicates, largest n=%zu), %zu mismatches",
                   s.engine_instances, duplicated, largest, mismatches);
  });
}

CriterionResult performance(const Settings& s) {
  return timed(5, "fast engine performance", [&](CriterionResult& r) {
    auto time_build = [&](std::size_t n) {
      const auto cloud = sample_cloud(Dimension(2), n, s.seed, 0);
      const auto t0 = std::chrono::steady_clock::now();
      const auto res = build_nng_fast(cloud.view());
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      return std::pair{secs, res.d_n};
    };
    const auto [t6, d6] = time_build(1000000);
    r.passed = t6 < s.perf_limit_1e6;
    r.detail = fmt("n=1e6: %.2f s (limit %g s, d_n=%.5f)", t6, s.perf_limit_1e6, d6);
    if (s.perf_include_1e7) {
      const auto [t7, d7] = time_build(10000000);
      r.passed = r.passed && t7 < s.perf_limit_1e7;
      r.detail += fmt("; n=1e7: %.2f s (limit %g s, d_n=%.5f)", t7, s.perf_limit_1e7, d7);
    } else {
      r.detail += "; n=1e7 skipped";
      r.passed = false;
    }
  });
}

CriterionResult containment(const Settings& s) {
  return timed(6, "containment frequencies", [&](CriterionResult& r) {
    const Dimension d(2);
    const auto u = containment_experiment(10000, 2.0, d, s.containment_replicates, s.seed);
    const auto v = containment_experiment(10000, -1.0, d, s.containment_replicates, s.seed + 1);
    r.passed = std::fabs(u.z()) <= s.containment_sigma && std::fabs(v.z()) <= s.containment_sigma;
    r.detail = fmt("U(2): %.4f vs %.4f (z=%.2f); V(-1): %.4f vs %.4f (z=%.2f); %zu replicates, tol %g sigma",
                   u.empirical_inside, u.exact_inside, u.z(), v.empirical_outside, v.exact_outside,
                   -v.z(), s.containment_replicates, s.containment_sigma);
  });
}

CriterionResult en_events(const Settings& s) {
  return timed(7, "E_n event probability", [&](CriterionResult& r) {
    FormulaParams p;
    p.c = 2.5;
    p.u = 1.1;
    p.eps = 0.05;
    const auto rep = en_event_experiment(10000, p, 1, s.en_replicates, s.seed);
    const auto& row = rep.rows.front();
    double worst_cov = 0.0;
    for (const auto& c : rep.covariances) worst_cov = std::max(worst_cov, std::fabs(c.test.z()));
    r.passed = std::fabs(row.z()) <= s.en_sigma && worst_cov <= s.covariance_sigma;
    r.detail = fmt("rho=%.5f: %zu hits / %zu, empirical %.3g vs exact %.3g (z=%.2f, tol %g); "
                   "max covariance |z| %.2f (tol %g)",
                   row.rho, row.hits, rep.replicates, row.empirical, row.exact, row.z(), s.en_sigma,
                   worst_cov, s.covariance_sigma);
  });
}

CriterionResult desk_scale_strong_law(const Settings& s) {
  return timed(8, "desk-scale strong law", [&](CriterionResult& r) {
    const Dimension d(2);
    SweepConfig env;
    env.d = d;
    env.n_grid = {1e3, 1e4, 1e5, 1e6};
    env.replicates = s.envelope_replicates;
    env.base_seed = s.seed;
    const auto env_report = strong_law_sweep(env);
    const double t_high = 2.0 * d.as_double() / std::numbers::sqrt2;
    const auto rows = envelope_check(env_report, 0.0, t_high);
    bool envelope_ok = true;
    std::string env_detail;
    for (const auto& row : rows) {
      if (row.n >= 1e5) {
        envelope_ok = envelope_ok && row.below_upper == 1.0;
        env_detail += fmt(" n=%g:%.2f", row.n, row.below_upper);
      }
    }

    SweepConfig sanity;
    sanity.d = d;
    sanity.n_grid = {1e6};
    sanity.replicates = s.ratio_replicates;
    sanity.base_seed = s.seed + 1;
    const auto sanity_report = strong_law_sweep(sanity);
    const auto& sum = sanity_report.summaries.front();
    const bool ratio_ok = sum.missing == 0 && sum.min >= s.ratio_lo && sum.max <= s.ratio_hi &&
                          sum.median >= s.median_lo && sum.median <= s.median_hi;

    std::string trend;
    for (const auto& su : env_report.summaries) trend += fmt(" %.3f", su.max);
    r.passed = envelope_ok && ratio_ok;
    r.detail = fmt("(a) fraction below r_n(%.3f):%s; (b) ratios in [%.3f, %.3f], median %.3f "
                   "(need [%g, %g], median [%g, %g]); (c) max ratio by n=1e3..1e6:%s vs d/sqrt2=%.3f",
                   t_high, env_detail.c_str(), sum.min, sum.max, sum.median, s.ratio_lo, s.ratio_hi,
                   s.median_lo, s.median_hi, trend.c_str(), env_report.reference_d);
  });
}

CriterionResult gumbel_fit(const Settings& s) {
  return timed(9, "Gumbel weak-law fit", [&](CriterionResult& r) {
    const auto rep = gumbel_fit_experiment(100000, Dimension(2), s.gumbel_replicates, s.seed);
    r.passed = rep.ks_distance < rep.ks_critical;
    r.detail = fmt("KS %.4f vs 1%% critical %.4f; location-centering %.3f, scale %.3f",
                   rep.ks_distance, rep.ks_critical, rep.location_minus_centering, rep.fit.scale);
  });
}

CriterionResult summability(const Settings&) {
  return timed(10, "summability diagnostics", [&](CriterionResult& r) {
    FormulaParams p;
    p.a = 2.0;
    p.c = 3.0;
    const auto upper3 = summability_diagnostics(SeriesKind::lemma2_upper, p, 1000);
    p.c = 1.0;
    const auto upper1 = summability_diagnostics(SeriesKind::lemma2_upper, p, 1000);
    bool ok = upper3.verdict == Verdict::summable && upper1.verdict == Verdict::divergent;
    r.detail = fmt("lemma2_upper c=3 ratio %.3f %s, c=1 ratio %.3f %s; prop1 (d=2, c=2.5, threshold %.4f):",
                   upper3.tail_decade_ratio, to_string(upper3.verdict), upper1.tail_decade_ratio,
                   to_string(upper1.verdict), scale_threshold(Dimension(2), 2.5));

    FormulaParams q;
    q.c = 2.5;
    const double thr = scale_threshold(q.d, q.c);
    const double below[] = {1.0, 1.2, 1.4};
    const double above[] = {2.0, 2.2, 2.5};
    for (double u : below) {
      q.u = u;
      const auto rep = summability_diagnostics(SeriesKind::prop1, q, 10000);
      ok = ok && rep.verdict == Verdict::divergent;
      r.detail += fmt(" u=%g %s", u, to_string(rep.verdict));
    }
    q.u = thr;
    const auto at = summability_diagnostics(SeriesKind::prop1, q, 10000);
    ok = ok && at.verdict == Verdict::inconclusive;
    r.detail += fmt(" u=thr %s", to_string(at.verdict));
    for (double u : above) {
      q.u = u;
      const auto rep = summability_diagnostics(SeriesKind::prop1, q, 10000);
      ok = ok && rep.verdict == Verdict::summable;
      r.detail += fmt(" u=%g %s", u, to_string(rep.verdict));
    }
    r.passed = ok;
  });
}

const std::vector<Suite>& suites() {
  static const std::vector<Suite> all = {
      {"special", special_functions},   {"ballmass", ball_mass_monte_carlo},
      {"lemma1", ball_mass_asym_regime},         {"engine", engine_equivalence},
      {"performance", performance},      {"containment", containment},
      {"en", en_events},                 {"envelope", desk_scale_strong_law},
      {"gumbel", gumbel_fit},            {"summability", summability},
  };
  return all;
}

std::string format_result(const CriterionResult& r) {
  return fmt("[%s] %d %s (%.1f s): ", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds) +
         r.detail;
}

}  // namespace lnnd::validation
