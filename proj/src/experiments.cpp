#include "lnnd/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "lnnd/errors.hpp"
#include "lnnd/gaussian_geometry.hpp"
#include "lnnd/kdtree.hpp"
#include "parallel.hpp"

namespace lnnd {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double squared_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

// Fills `out` with point `index` of the stream.
void gaussian_point(const StreamKey& stream, std::uint64_t index, std::span<double> out) {
  PhiloxEngine engine(stream, index);
  std::normal_distribution<double> normal;
  for (double& v : out) v = normal(engine);
}

SweepRecord measure(const PointsView& cloud, double n, std::uint64_t replicate,
                    std::uint64_t seed, double containment_radius) {
  SweepRecord rec;
  rec.n = n;
  rec.replicate = replicate;
  rec.seed = seed;
  rec.points = cloud.size();
  double max_sq = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i) max_sq = std::max(max_sq, squared_norm(cloud.point(i)));
  rec.contained = max_sq < containment_radius * containment_radius;
  if (cloud.size() < 2) {
    rec.d_n = kNaN;
    rec.ratio = kNaN;
  } else {
    rec.d_n = lnnd(cloud);
    rec.ratio = lnnd_ratio(n, rec.d_n);
  }
  return rec;
}

double decade_sum(const std::vector<double>& terms, long first, long lo_exclusive, long hi_inclusive) {
  double s = 0.0;
  for (long i = std::max(lo_exclusive + 1, first); i <= hi_inclusive; ++i) {
    s += terms[static_cast<std::size_t>(i - first)];
  }
  return s;
}

}  // namespace

double lnnd_ratio(double n, double d_n) {
  const double ln_n = std::log(n);
  return std::sqrt(ln_n) * d_n / std::log(ln_n);
}

const char* to_string(ProcessKind p) {
  switch (p) {
    case ProcessKind::binomial: return "binomial";
    case ProcessKind::poisson: return "poisson";
    case ProcessKind::coupled: return "coupled";
  }
  return "?";
}

ProcessKind parse_process_kind(const std::string& s) {
  if (s == "binomial") return ProcessKind::binomial;
  if (s == "poisson") return ProcessKind::poisson;
  if (s == "coupled") return ProcessKind::coupled;
  throw DomainError("unknown process '" + s + "' (expected binomial|poisson|coupled)");
}

void SweepConfig::validate() const {
  if (n_grid.empty()) throw DomainError("sweep needs a nonempty n grid");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    const double n = n_grid[i];
    if (!(n >= 16.0) || n != std::floor(n) || n > 9.0e15) {
      throw DomainError("n grid entries must be integers >= 16, got " + std::to_string(n));
    }
    if (i > 0 && !(n > n_grid[i - 1])) throw DomainError("n grid must be increasing");
  }
  if (replicates < 1) throw DomainError("replicates must be >= 1");
  if (!(params.d == d)) throw DomainError("formula parameters and sweep disagree on d");
}

std::vector<RatioSummary> summarize(const std::vector<SweepRecord>& records,
                                    const std::vector<double>& n_grid) {
  std::vector<RatioSummary> out;
  for (double n : n_grid) {
    RatioSummary s;
    s.n = n;
    std::vector<double> ratios;
    for (const auto& r : records) {
      if (r.n != n) continue;
      if (std::isnan(r.ratio)) ++s.missing;
      else ratios.push_back(r.ratio);
    }
    s.count = ratios.size();
    if (!ratios.empty()) {
      std::sort(ratios.begin(), ratios.end());
      s.mean = stats::mean(ratios);
      s.min = ratios.front();
      s.max = ratios.back();
      s.median = stats::quantile(ratios, 0.5);
      s.q05 = stats::quantile(ratios, 0.05);
      s.q25 = stats::quantile(ratios, 0.25);
      s.q75 = stats::quantile(ratios, 0.75);
      s.q95 = stats::quantile(ratios, 0.95);
    } else {
      s.mean = s.min = s.max = s.median = s.q05 = s.q25 = s.q75 = s.q95 = kNaN;
    }
    out.push_back(s);
  }
  return out;
}

ExperimentReport strong_law_sweep(const SweepConfig& config) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const Dimension d = config.d;
  std::vector<double> radius;
  for (double n : config.n_grid) radius.push_back(big_radius(n, config.params.c, d, config.variant));

  const auto max_n = static_cast<std::size_t>(config.n_grid.back());
  std::vector<std::vector<SweepRecord>> per_replicate(config.replicates);
  detail::parallel_for_each(config.replicates, [&](std::size_t r) {
    auto& out = per_replicate[r];
    const std::uint64_t seed = config.base_seed;
    if (config.process == ProcessKind::poisson) {
      const auto family = poissonize(d, config.n_grid, seed, r);
      for (std::size_t k = 0; k < config.n_grid.size(); ++k) {
        out.push_back(measure(family.view(k), config.n_grid[k], r, seed, radius[k]));
      }
      return;
    }
    const auto coords = sample_gaussian_points(d, {seed, r, StreamRole::points}, 0, max_n);
    const PointsView all(d, coords);
    for (std::size_t k = 0; k < config.n_grid.size(); ++k) {
      const auto n = static_cast<std::size_t>(config.n_grid[k]);
      auto rec = measure(all.prefix(n), config.n_grid[k], r, seed, radius[k]);
      if (config.process == ProcessKind::coupled) {
        const auto [minus, extra] = sample_coupling_counts(n, seed, r);
        rec.coupled = minus <= n && n <= minus + extra;
      }
      out.push_back(rec);
    }
  });

  ExperimentReport report;
  report.config = config;
  for (auto& v : per_replicate) report.records.insert(report.records.end(), v.begin(), v.end());
  std::stable_sort(report.records.begin(), report.records.end(),
                   [](const SweepRecord& a, const SweepRecord& b) {
                     return a.n != b.n ? a.n < b.n : a.replicate < b.replicate;
                   });
  report.summaries = summarize(report.records, config.n_grid);
  report.reference_d = d.as_double() / std::numbers::sqrt2;
  report.reference_d_minus = (d.as_double() - 1.0) / std::numbers::sqrt2;
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

std::vector<EnvelopeRow> envelope_check(const ExperimentReport& report, double t_low,
                                        double t_high) {
  if (!(t_low >= 0.0) || !(t_high >= 0.0)) throw DomainError("envelope scales must be >= 0");
  std::vector<EnvelopeRow> rows;
  for (double n : report.config.n_grid) {
    EnvelopeRow row;
    row.n = n;
    row.r_upper = small_radius(n, t_high);
    row.r_lower = small_radius(n, t_low);
    std::size_t below = 0;
    std::size_t above = 0;
    for (const auto& rec : report.records) {
      if (rec.n != n || std::isnan(rec.d_n)) continue;
      ++row.count;
      if (rec.d_n < row.r_upper) ++below;
      if (rec.d_n >= row.r_lower) ++above;
    }
    if (row.count > 0) {
      row.below_upper = static_cast<double>(below) / static_cast<double>(row.count);
      row.above_lower = static_cast<double>(above) / static_cast<double>(row.count);
    } else {
      row.below_upper = row.above_lower = kNaN;
    }
    rows.push_back(row);
  }
  return rows;
}

double ContainmentResult::z() const {
  return standard_error > 0.0 ? (empirical_inside - exact_inside) / standard_error : 0.0;
}

ContainmentResult containment_experiment(std::size_t n, double c, Dimension d,
                                         std::size_t replicates, std::uint64_t seed,
                                         ConstantVariant variant) {
  if (replicates < 1) throw DomainError("replicates must be >= 1");
  ContainmentResult res;
  res.n = n;
  res.c = c;
  res.replicates = replicates;
  res.radius = big_radius(static_cast<double>(n), c, d, variant);
  const double r2 = res.radius * res.radius;
  const auto dim = static_cast<std::size_t>(d.value());

  std::vector<char> inside(replicates, 0);
  detail::parallel_for_each(replicates, [&](std::size_t r) {
    const StreamKey stream{seed, r, StreamRole::points};
    std::vector<double> x(dim);
    for (std::size_t i = 0; i < n; ++i) {
      gaussian_point(stream, i, x);
      if (squared_norm(x) >= r2) return;
    }
    inside[r] = 1;
  });
  res.inside_count = static_cast<std::size_t>(std::count(inside.begin(), inside.end(), 1));
  const double reps = static_cast<double>(replicates);
  res.empirical_inside = static_cast<double>(res.inside_count) / reps;
  res.empirical_outside = 1.0 - res.empirical_inside;
  const double log_inside = static_cast<double>(n) * std::log1p(-radial_tail(res.radius, d));
  res.exact_inside = std::exp(log_inside);
  res.exact_outside = -std::expm1(log_inside);
  res.asym = containment_defect_asym(static_cast<double>(n), c, d, variant);
  res.standard_error = stats::binomial_standard_error(res.exact_inside, replicates);
  return res;
}

double VacancyResult::z() const {
  return standard_error > 0.0 ? (empirical - exact) / standard_error : 0.0;
}

VacancyResult vacancy_experiment(std::size_t n, double rho, double r_inner, double r_outer,
                                 Dimension d, std::size_t replicates, std::uint64_t seed) {
  if (replicates < 1) throw DomainError("replicates must be >= 1");
  VacancyResult res;
  res.n = n;
  res.replicates = replicates;
  res.annulus_mass = std::exp(log_annulus_mass(rho, r_inner, r_outer, d));
  res.exact = std::exp(static_cast<double>(n) * std::log1p(-res.annulus_mass));
  std::vector<double> center(static_cast<std::size_t>(d.value()), 0.0);
  center[0] = rho;
  std::vector<char> empty(replicates, 0);
  detail::parallel_for_each(replicates, [&](std::size_t r) {
    const auto cloud = sample_cloud(d, n, seed, r);
    empty[r] = vacancy_event(cloud.view(), center, r_inner, r_outer) ? 1 : 0;
  });
  res.empirical = static_cast<double>(std::count(empty.begin(), empty.end(), 1)) /
                  static_cast<double>(replicates);
  res.standard_error = stats::binomial_standard_error(res.exact, replicates);
  return res;
}

PackingResult packing_construction(double n, const FormulaParams& params, ConstantVariant variant) {
  const Dimension d = params.d;
  const int dim = d.value();
  PackingResult res;
  res.annulus_inner = big_radius(n, -2.0, d, variant);
  res.annulus_outer = big_radius(n, params.c, d, variant);
  const double r = small_radius(n, params.u);
  res.spacing = 2.0 * r;
  res.bound = packing_count_bound(n, params.c, params.u, d, variant);
  if (!(res.annulus_outer > res.annulus_inner) || !(r > 0.0)) return res;

  const double s = res.spacing;
  const double lo2 = res.annulus_inner * res.annulus_inner;
  const double hi2 = res.annulus_outer * res.annulus_outer;
  // Index ranges of the anchored lattice (R' e_1) + s Z^d that can reach A_n.
  const auto k0_lo = static_cast<long>(std::ceil((-res.annulus_outer - res.annulus_inner) / s));
  const auto k0_hi = static_cast<long>(std::floor((res.annulus_outer - res.annulus_inner) / s));
  const auto kj = static_cast<long>(std::floor(res.annulus_outer / s));
  double candidates = static_cast<double>(k0_hi - k0_lo + 1);
  for (int j = 1; j < dim; ++j) candidates *= static_cast<double>(2 * kj + 1);
  if (candidates > 5e7) {
    throw DomainError("packing lattice too large (" + std::to_string(candidates) + " candidates)");
  }

  struct Candidate {
    double norm2;
    std::vector<double> x;
    bool anchor;
  };
  std::vector<Candidate> kept;
  std::vector<long> k(static_cast<std::size_t>(dim), -kj);
  k[0] = k0_lo;
  for (;;) {
    std::vector<double> x(static_cast<std::size_t>(dim));
    x[0] = res.annulus_inner + s * static_cast<double>(k[0]);
    for (int j = 1; j < dim; ++j) x[static_cast<std::size_t>(j)] = s * static_cast<double>(k[static_cast<std::size_t>(j)]);
    const double n2 = squared_norm(x);
    if (n2 >= lo2 && n2 < hi2) {
      const bool anchor = std::all_of(k.begin(), k.end(), [](long v) { return v == 0; });
      kept.push_back({n2, std::move(x), anchor});
    }
    int j = 0;
    for (; j < dim; ++j) {
      auto& kk = k[static_cast<std::size_t>(j)];
      const long top = j == 0 ? k0_hi : kj;
      if (kk < top) {
        ++kk;
        break;
      }
      kk = j == 0 ? k0_lo : -kj;
    }
    if (j == dim) break;
  }
  std::sort(kept.begin(), kept.end(), [](const Candidate& a, const Candidate& b) {
    if (a.anchor != b.anchor) return a.anchor;
    if (a.norm2 != b.norm2) return a.norm2 < b.norm2;
    return a.x < b.x;
  });
  for (const auto& c : kept) res.centers.insert(res.centers.end(), c.x.begin(), c.x.end());
  res.count = kept.size();
  return res;
}

CoveringResult covering_construction(long m, const FormulaParams& params, ConstantVariant variant,
                                     std::size_t probes, std::uint64_t seed) {
  if (m < 2) throw DomainError("covering_construction requires m >= 2");
  if (!(params.a > 1.0)) throw DomainError("covering_construction requires a > 1");
  const Dimension d = params.d;
  const int dim = d.value();
  const auto udim = static_cast<std::size_t>(dim);
  const double ln_a = std::log(params.a);
  const double md = static_cast<double>(m);
  CoveringResult res;
  res.domain_radius = big_radius_ln((md + 1.0) * ln_a, params.c, d, variant);
  res.ball_radius = small_radius_ln(md * ln_a, params.eps);
  res.bound = covering_count_bound(md, d);
  const double R = res.domain_radius;
  const double r = res.ball_radius;

  if (r >= R) {
    res.centers.assign(udim, 0.0);
  } else {
    // Cells of side h have half-diagonal r, so each is covered by the ball
    // around its center.
    const double h = 2.0 * r / std::sqrt(d.as_double());
    const auto K = static_cast<long>(std::ceil(R / h)) + 1;
    if (std::pow(2.0 * static_cast<double>(K) + 1.0, dim) > 5e7) {
      throw DomainError("covering lattice too large");
    }
    std::vector<long> k(udim, -K);
    for (;;) {
      double gap2 = 0.0;
      for (std::size_t j = 0; j < udim; ++j) {
        const double g = std::max(std::fabs(h * static_cast<double>(k[j])) - 0.5 * h, 0.0);
        gap2 += g * g;
      }
      if (gap2 <= R * R) {
        for (std::size_t j = 0; j < udim; ++j) res.centers.push_back(h * static_cast<double>(k[j]));
      }
      std::size_t j = 0;
      for (; j < udim; ++j) {
        if (k[j] < K) {
          ++k[j];
          break;
        }
        k[j] = -K;
      }
      if (j == udim) break;
    }
  }
  res.count = res.centers.size() / udim;

  // Uniform probes in B(0, R): Gaussian direction, radius R U^{1/d}.
  const KdTree tree(PointsView(d, res.centers), 8);
  const StreamKey stream{seed, static_cast<std::uint64_t>(m), StreamRole::probes};
  std::vector<double> y(udim);
  res.probes = probes;
  for (std::size_t i = 0; i < probes; ++i) {
    PhiloxEngine engine(stream, i);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> uniform;
    for (double& v : y) v = normal(engine);
    const double scale = R * std::pow(uniform(engine), 1.0 / d.as_double()) / std::sqrt(squared_norm(y));
    for (double& v : y) v *= scale;
    const auto nb = tree.nearest_other(y, KdTree::npos);
    if (!(nb.squared_distance <= r * r)) ++res.uncovered_probes;
  }
  return res;
}

double EnProbeRow::z() const {
  return standard_error > 0.0 ? (empirical - exact) / standard_error : 0.0;
}

EnEventReport en_event_experiment(std::size_t n, const FormulaParams& params,
                                  std::size_t probe_count, std::size_t replicates,
                                  std::uint64_t seed, ConstantVariant variant) {
  if (replicates < 2) throw DomainError("en_event_experiment needs at least 2 replicates");
  if (n < 16) throw DomainError("en_event_experiment requires n >= 16");
  if (!(params.eps > 0.0) || params.u < params.eps) {
    throw DomainError("en_event_experiment requires u >= eps > 0");
  }
  const Dimension d = params.d;
  const auto dim = static_cast<std::size_t>(d.value());
  const double nd = static_cast<double>(n);
  const double n34 = std::pow(nd, 0.75);

  EnEventReport rep;
  rep.n = n;
  rep.replicates = replicates;
  rep.params = params;
  rep.r_eps = small_radius(nd, params.eps);
  rep.r_u = small_radius(nd, params.u);
  const auto packing = packing_construction(nd, params, variant);
  rep.annulus_inner = packing.annulus_inner;
  rep.annulus_outer = packing.annulus_outer;
  const std::size_t probes = std::min(probe_count, packing.count);
  if (probes == 0) throw DomainError("packing produced no probe centers");

  for (std::size_t p = 0; p < probes; ++p) {
    EnProbeRow row;
    row.probe = p;
    row.rho = std::sqrt(squared_norm(std::span<const double>(packing.centers).subspan(p * dim, dim)));
    row.exact = (nd - n34) * ball_mass(row.rho, rep.r_eps, d) *
                std::exp(-(nd + n34) * ball_mass(row.rho, rep.r_u, d));
    rep.rows.push_back(row);
  }

  const double eps2 = rep.r_eps * rep.r_eps;
  const double u2 = rep.r_u * rep.r_u;
  const double near = std::max(0.0, rep.annulus_inner - rep.r_u);
  const double far = rep.annulus_outer + rep.r_u;
  // Region counts at probe 0: P^-(U), P^-(V), I(U), I(V).
  std::vector<std::array<double, 4>> counts0(replicates);
  std::vector<std::vector<char>> hit(replicates, std::vector<char>(probes, 0));
  std::vector<char> coupling_failed(replicates, 0);

  detail::parallel_for_each(replicates, [&](std::size_t r) {
    const auto [n_minus, extra] = sample_coupling_counts(n, seed, r);
    coupling_failed[r] = (n_minus <= n && n <= n_minus + extra) ? 0 : 1;
    const StreamKey stream{seed, r, StreamRole::points};
    std::vector<std::array<long, 4>> c(probes, {0, 0, 0, 0});
    std::vector<double> y(dim);
    for (std::size_t i = 0; i < n_minus + extra; ++i) {
      gaussian_point(stream, i, y);
      const double norm = std::sqrt(squared_norm(y));
      if (norm < near || norm >= far) continue;
      const std::size_t base = i < n_minus ? 0 : 2;
      for (std::size_t p = 0; p < probes; ++p) {
        const double d2 = squared_distance(y.data(), packing.centers.data() + p * dim, d.value());
        if (d2 < eps2) ++c[p][base];
        else if (d2 < u2) ++c[p][base + 1];
      }
    }
    for (std::size_t p = 0; p < probes; ++p) {
      hit[r][p] = (c[p][0] == 1 && c[p][1] == 0 && c[p][2] == 0 && c[p][3] == 0) ? 1 : 0;
    }
    for (std::size_t k = 0; k < 4; ++k) counts0[r][k] = static_cast<double>(c[0][k]);
  });

  for (auto& row : rep.rows) {
    for (std::size_t r = 0; r < replicates; ++r) row.hits += static_cast<std::size_t>(hit[r][row.probe]);
    row.empirical = static_cast<double>(row.hits) / static_cast<double>(replicates);
    row.standard_error = stats::binomial_standard_error(row.exact, replicates);
  }
  static const char* kNames[4] = {"minus_inner", "minus_ring", "increment_inner", "increment_ring"};
  std::array<std::vector<double>, 4> columns;
  for (std::size_t k = 0; k < 4; ++k) {
    for (std::size_t r = 0; r < replicates; ++r) columns[k].push_back(counts0[r][k]);
  }
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = a + 1; b < 4; ++b) {
      CovarianceRow row{kNames[a], kNames[b], {}};
      const bool degenerate = stats::variance(columns[a]) == 0.0 || stats::variance(columns[b]) == 0.0;
      if (!degenerate) row.test = stats::covariance_test(columns[a], columns[b]);
      rep.covariances.push_back(row);
    }
  }
  rep.coupling_failure_rate =
      static_cast<double>(std::count(coupling_failed.begin(), coupling_failed.end(), 1)) /
      static_cast<double>(replicates);
  return rep;
}

GumbelReport gumbel_fit_experiment(std::size_t n, Dimension d, std::size_t replicates,
                                   std::uint64_t seed) {
  if (replicates < 2) {
    throw DomainError("Gumbel fit needs at least 2 replicates, got " + std::to_string(replicates));
  }
  if (n < 16) throw DomainError("gumbel_fit_experiment requires n >= 16");
  GumbelReport rep{n, d, replicates, {}, {}, {}, 0, 0, 0, 0};
  rep.d_n.resize(replicates);
  detail::parallel_for_each(replicates, [&](std::size_t r) {
    rep.d_n[r] = lnnd(sample_cloud(d, n, seed, r).view());
  });
  const double ln_n = std::log(static_cast<double>(n));
  for (double v : rep.d_n) rep.scaled.push_back(std::sqrt(2.0 * ln_n) * v);
  rep.fit = stats::fit_gumbel(rep.scaled);
  rep.centering = (d.as_double() - 1.0) * std::log(ln_n);
  rep.location_minus_centering = rep.fit.location - rep.centering;
  std::vector<double> standardized;
  for (double v : rep.scaled) standardized.push_back((v - rep.fit.location) / rep.fit.scale);
  rep.ks_distance = stats::ks_statistic(standardized, [](double z) { return stats::gumbel_cdf(z); });
  rep.ks_critical = stats::ks_critical_value(replicates, 0.01);
  return rep;
}

const char* to_string(SeriesKind k) {
  switch (k) {
    case SeriesKind::lemma2_upper: return "lemma2_upper";
    case SeriesKind::lemma2_lower: return "lemma2_lower";
    case SeriesKind::prop1: return "prop1";
    case SeriesKind::prop2: return "prop2";
  }
  return "?";
}

SeriesKind parse_series_kind(const std::string& s) {
  if (s == "lemma2_upper") return SeriesKind::lemma2_upper;
  if (s == "lemma2_lower") return SeriesKind::lemma2_lower;
  if (s == "prop1") return SeriesKind::prop1;
  if (s == "prop2") return SeriesKind::prop2;
  throw DomainError("unknown series '" + s + "' (expected lemma2_upper|lemma2_lower|prop1|prop2)");
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::summable: return "summable";
    case Verdict::divergent: return "divergent";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

SummabilityReport summability_diagnostics(SeriesKind kind, const FormulaParams& params,
                                          long horizon, ConstantVariant variant) {
  if (horizon < 100) throw DomainError("summability horizon must be >= 100");
  const Dimension d = params.d;
  const double dd = d.as_double();
  SummabilityReport rep;
  rep.kind = kind;
  rep.horizon = horizon;

  // log of A a^k R_{a^j}(c)^{d-2} e^{-R^2/2}.
  auto log_defect = [&](long k, long j) {
    const double ln_a = std::log(params.a);
    const double R = big_radius_ln(static_cast<double>(j) * ln_a, params.c, d, variant);
    return log_radial_constant(d, variant) + static_cast<double>(k) * ln_a +
           (dd - 2.0) * std::log(R) - 0.5 * R * R;
  };
  // Smallest index at which the series term is defined.
  auto defined_from = [&](auto&& term, long lo) {
    for (long i = lo; i <= horizon; ++i) {
      try {
        term(i);
        return i;
      } catch (const DomainError&) {
      }
    }
    throw DomainError("series term undefined on the whole horizon");
  };

  std::function<double(long)> term;
  long first = 1;
  switch (kind) {
    case SeriesKind::lemma2_upper:
      if (!(params.a > 1.0)) throw DomainError("subsequence base a must exceed 1");
      term = [&](long k) { return std::exp(log_defect(k + 1, k)); };
      rep.at_threshold = std::fabs(params.c - 2.0) <= 1e-12;
      break;
    case SeriesKind::lemma2_lower:
      if (!(params.a > 1.0)) throw DomainError("subsequence base a must exceed 1");
      term = [&](long k) { return std::exp(-std::exp(log_defect(k, k + 1))); };
      rep.at_threshold = std::fabs(params.c) <= 1e-12;
      break;
    case SeriesKind::prop1: {
      term = [&](long m) {
        return covering_count_bound(static_cast<double>(m), d) * fm_bound_simplified(m, params);
      };
      first = 2;
      const double thr = scale_threshold(d, params.c);
      rep.at_threshold = std::fabs(params.u - thr) <= 1e-12 * std::max(1.0, std::fabs(thr));
      break;
    }
    case SeriesKind::prop2:
      term = [&](long n) {
        return final_series_term(static_cast<double>(n), params.eps, d, params.C);
      };
      first = 3;
      rep.at_threshold = std::fabs(params.eps) <= 1e-12;
      break;
  }
  first = defined_from(term, first);
  rep.first_index = first;
  if (horizon / 10 <= first) {
    throw DomainError("horizon " + std::to_string(horizon) +
                      " too short: the series is defined only from index " + std::to_string(first));
  }

  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(horizon - first + 1));
  double partial = 0.0;
  long next_checkpoint = first;
  for (long i = first; i <= horizon; ++i) {
    const double t = term(i);
    terms.push_back(t);
    partial += t;
    if (i == next_checkpoint || i == horizon) {
      rep.rows.push_back({i, t, partial});
      if (i < 100) {
        next_checkpoint = i + 1;
      } else {
        const auto step = static_cast<long>(std::ceil(static_cast<double>(i) * (std::pow(10.0, 1.0 / 50.0) - 1.0)));
        next_checkpoint = i + std::max(1L, step);
      }
    }
  }
  rep.last_decade_sum = decade_sum(terms, first, horizon / 10, horizon);
  rep.previous_decade_sum = decade_sum(terms, first, horizon / 100, horizon / 10);
  if (rep.last_decade_sum == 0.0) rep.tail_decade_ratio = 0.0;
  else if (rep.previous_decade_sum == 0.0) rep.tail_decade_ratio = std::numeric_limits<double>::infinity();
  else rep.tail_decade_ratio = rep.last_decade_sum / rep.previous_decade_sum;

  if (rep.at_threshold) rep.verdict = Verdict::inconclusive;
  else if (rep.tail_decade_ratio < kSummableRatio) rep.verdict = Verdict::summable;
  else if (rep.tail_decade_ratio >= kDivergentRatio) rep.verdict = Verdict::divergent;
  else rep.verdict = Verdict::inconclusive;
  return rep;
}

}  // namespace lnnd
