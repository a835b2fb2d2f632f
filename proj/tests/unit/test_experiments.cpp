#include <doctest.h>

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lnnd/errors.hpp"
#include "lnnd/experiments.hpp"

using namespace lnnd;

namespace {
SweepConfig small_sweep(ProcessKind process = ProcessKind::binomial) {
  SweepConfig cfg;
  cfg.n_grid = {100, 1000, 5000};
  cfg.replicates = 6;
  cfg.base_seed = 21;
  cfg.process = process;
  return cfg;
}
}  // namespace

TEST_CASE("sweep records recompute") {
  const auto rep = strong_law_sweep(small_sweep());
  REQUIRE(rep.records.size() == 18);
  for (const auto& r : rep.records) {
    CHECK(r.ratio == lnnd_ratio(r.n, r.d_n));
    CHECK(r.ratio == std::sqrt(std::log(r.n)) * r.d_n / std::log(std::log(r.n)));
    CHECK(r.points == static_cast<std::size_t>(r.n));
  }
  CHECK(std::is_sorted(rep.records.begin(), rep.records.end(), [](const auto& a, const auto& b) {
    return a.n != b.n ? a.n < b.n : a.replicate < b.replicate;
  }));
  CHECK(rep.reference_d == doctest::Approx(std::numbers::sqrt2));
  CHECK(rep.reference_d_minus == doctest::Approx(1.0 / std::numbers::sqrt2));
}

TEST_CASE("sweep matches an independent cloud") {
  const auto rep = strong_law_sweep(small_sweep());
  const auto cloud = sample_cloud(Dimension(2), 1000, 21, 3);
  const double d_n = lnnd::lnnd(cloud.view());
  const auto it = std::find_if(rep.records.begin(), rep.records.end(),
                               [](const auto& r) { return r.n == 1000 && r.replicate == 3; });
  REQUIRE(it != rep.records.end());
  CHECK(it->d_n == d_n);
}

TEST_CASE("sweep is reproducible and independent of thread count") {
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const auto a = strong_law_sweep(small_sweep());
  omp_set_num_threads(4);
  const auto b = strong_law_sweep(small_sweep());
  omp_set_num_threads(saved);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) CHECK(a.records[i].d_n == b.records[i].d_n);
}

TEST_CASE("summaries depend only on the multiset of outcomes") {
  const auto rep = strong_law_sweep(small_sweep());
  auto shuffled = rep.records;
  std::reverse(shuffled.begin(), shuffled.end());
  for (auto& r : shuffled) r.replicate = 100 - r.replicate;
  const auto s1 = summarize(rep.records, rep.config.n_grid);
  const auto s2 = summarize(shuffled, rep.config.n_grid);
  for (std::size_t i = 0; i < s1.size(); ++i) {
    CHECK(s1[i].median == s2[i].median);
    CHECK(s1[i].max == s2[i].max);
    CHECK(s1[i].q05 == s2[i].q05);
  }
}

TEST_CASE("missing values are counted, not summarized") {
  std::vector<SweepRecord> recs(3);
  for (std::size_t i = 0; i < 3; ++i) {
    recs[i].n = 16;
    recs[i].replicate = i;
    recs[i].ratio = i == 1 ? std::nan("") : 1.0 + static_cast<double>(i);
  }
  const auto s = summarize(recs, {16});
  CHECK(s[0].count == 2);
  CHECK(s[0].missing == 1);
  CHECK(s[0].mean == doctest::Approx(2.0));
}

TEST_CASE("poisson and coupled sweeps") {
  const auto p = strong_law_sweep(small_sweep(ProcessKind::poisson));
  bool differs = false;
  for (const auto& r : p.records) differs = differs || r.points != static_cast<std::size_t>(r.n);
  CHECK(differs);
  const auto c = strong_law_sweep(small_sweep(ProcessKind::coupled));
  const auto b = strong_law_sweep(small_sweep());
  for (std::size_t i = 0; i < c.records.size(); ++i) CHECK(c.records[i].d_n == b.records[i].d_n);
}

TEST_CASE("sweep config validation") {
  auto cfg = small_sweep();
  cfg.n_grid = {10, 100};
  CHECK_THROWS_AS(strong_law_sweep(cfg), DomainError);
  cfg.n_grid = {100, 50};
  CHECK_THROWS_AS(strong_law_sweep(cfg), DomainError);
  cfg.n_grid = {100.5};
  CHECK_THROWS_AS(strong_law_sweep(cfg), DomainError);
  cfg.n_grid = {100};
  cfg.replicates = 0;
  CHECK_THROWS_AS(strong_law_sweep(cfg), DomainError);
}

TEST_CASE("envelope properties") {
  const auto rep = strong_law_sweep(small_sweep());
  for (const auto& row : envelope_check(rep, 0.0, 3.0)) CHECK(row.above_lower == 1.0);
  for (double t : {0.5, 1.0, 1.5}) {
    for (const auto& row : envelope_check(rep, t, t)) {
      CHECK(row.above_lower + row.below_upper == doctest::Approx(1.0));
    }
  }
  double prev = 0.0;
  for (double t = 0.2; t < 4.0; t += 0.2) {
    const double f = envelope_check(rep, 0.0, t)[2].below_upper;
    CHECK(f >= prev);
    prev = f;
  }
}

TEST_CASE("containment far in the tail") {
  const auto r = containment_experiment(1000, 50.0, Dimension(2), 1000, 4);
  CHECK(r.empirical_inside == 1.0);
  CHECK(r.exact_outside < 1e-6);
}

TEST_CASE("containment matches the exact probability") {
  const auto r = containment_experiment(1000, 0.0, Dimension(3), 1000, 5);
  CHECK(std::fabs(r.z()) < 4.0);
  CHECK(r.empirical_inside + r.empirical_outside == doctest::Approx(1.0));
}

TEST_CASE("vacancy frequency") {
  const auto r = vacancy_experiment(30, 1.5, 0.2, 0.6, Dimension(2), 2000, 6);
  CHECK(r.exact > 0.01);
  CHECK(std::fabs(r.z()) < 4.0);
}

TEST_CASE("E_n collapsed to exactly one point in a ball") {
  FormulaParams p;
  p.c = 2.5;
  p.u = 0.8;
  p.eps = 0.8;
  const auto r = en_event_experiment(2000, p, 2, 2000, 9);
  for (const auto& row : r.rows) {
    CHECK(row.exact > 0.1);
    CHECK(std::fabs(row.z()) < 4.0);
  }
}

TEST_CASE("E_n with a ring at testable frequency") {
  FormulaParams p;
  p.c = 2.5;
  p.u = 0.8;
  p.eps = 0.27;
  const auto r = en_event_experiment(2000, p, 1, 2000, 10);
  CHECK(r.rows[0].exact > 0.005);
  CHECK(std::fabs(r.rows[0].z()) < 4.0);
  for (const auto& c : r.covariances) CHECK(std::fabs(c.test.z()) < 4.0);
  p.u = 0.1;
  CHECK_THROWS_AS(en_event_experiment(2000, p, 1, 10, 1), DomainError);
}

TEST_CASE("packing construction") {
  FormulaParams p;
  p.c = 2.0;
  p.u = 1.1;
  for (double n : {1e5, 1e6, 1e8}) {
    const auto r = packing_construction(n, p);
    const auto d = static_cast<std::size_t>(p.d.value());
    REQUIRE(r.count > 0);
    for (std::size_t i = 0; i < r.count; ++i) {
      const double x = r.centers[i * d];
      const double y = r.centers[i * d + 1];
      const double norm = std::hypot(x, y);
      CHECK(norm >= r.annulus_inner * (1 - 1e-12));
      CHECK(norm < r.annulus_outer);
      for (std::size_t j = 0; j < i; ++j) {
        const double dist = std::hypot(x - r.centers[j * d], y - r.centers[j * d + 1]);
        CHECK(dist >= r.spacing * (1 - 1e-12));
      }
    }
    CHECK(r.centers[0] == r.annulus_inner);
    CHECK(static_cast<double>(r.count) >= 0.25 * r.bound.ratio_form);
  }
  const auto r6 = packing_construction(1e6, p);
  CHECK(static_cast<double>(r6.count) <= 4.0 * r6.bound.simplified);
  CHECK(static_cast<double>(r6.count) >= r6.bound.simplified / 4.0);
}

TEST_CASE("degenerate packing") {
  FormulaParams p;
  p.c = -2.0;
  const auto r = packing_construction(1e4, p);
  CHECK(r.count == 0);
  CHECK(r.centers.empty());
}

TEST_CASE("covering construction") {
  FormulaParams p;
  p.c = 2.5;
  p.eps = 0.1;
  p.a = 2.0;
  const auto r = covering_construction(20, p, ConstantVariant::normalized, 100000, 3);
  CHECK(r.covered());
  std::vector<double> ratios;
  for (long m = 10; m <= 25; ++m) {
    const auto c = covering_construction(m, p, ConstantVariant::normalized, 2000, 3);
    CHECK(c.covered());
    ratios.push_back(static_cast<double>(c.count) / c.bound);
  }
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  CHECK(*hi / *lo < 2.0);
  p.eps = 100.0;
  const auto one = covering_construction(5, p, ConstantVariant::normalized, 1000, 3);
  CHECK(one.count == 1);
  CHECK(one.covered());
}

TEST_CASE("Gumbel fit needs replicates") {
  CHECK_THROWS_AS(gumbel_fit_experiment(1000, Dimension(2), 1, 0), DomainError);
  const auto g = gumbel_fit_experiment(2000, Dimension(2), 40, 2);
  CHECK(g.scaled.size() == 40);
  CHECK(g.centering == doctest::Approx(std::log(std::log(2000.0))));
}

TEST_CASE("summability verdicts") {
  FormulaParams p;
  p.c = 3.0;
  const auto up3 = summability_diagnostics(SeriesKind::lemma2_upper, p, 1000);
  CHECK(up3.tail_decade_ratio < 0.7);
  CHECK(up3.verdict == Verdict::summable);
  p.c = 1.0;
  const auto up1 = summability_diagnostics(SeriesKind::lemma2_upper, p, 1000);
  CHECK(up1.tail_decade_ratio >= 1.0);
  CHECK(up1.verdict == Verdict::divergent);
  p.c = 2.0;
  CHECK(summability_diagnostics(SeriesKind::lemma2_upper, p, 1000).verdict == Verdict::inconclusive);
  p.c = -1.0;
  CHECK(summability_diagnostics(SeriesKind::lemma2_lower, p, 1000).verdict == Verdict::summable);
  p.c = 1.0;
  CHECK(summability_diagnostics(SeriesKind::lemma2_lower, p, 1000).verdict == Verdict::divergent);

  FormulaParams q;
  q.c = 2.5;
  q.u = scale_threshold(q.d, q.c);
  CHECK(summability_diagnostics(SeriesKind::prop1, q, 1000).verdict == Verdict::inconclusive);
  q.eps = 0.0;
  CHECK(summability_diagnostics(SeriesKind::prop2, q, 1000).verdict == Verdict::inconclusive);
  CHECK_THROWS_AS(summability_diagnostics(SeriesKind::prop1, q, 99), DomainError);
}

TEST_CASE("partial sums are tabulated at increasing checkpoints") {
  FormulaParams p;
  p.c = 3.0;
  const auto r = summability_diagnostics(SeriesKind::lemma2_upper, p, 5000);
  REQUIRE(r.rows.size() > 100);
  CHECK(r.rows.back().index == 5000);
  for (std::size_t i = 1; i < r.rows.size(); ++i) {
    CHECK(r.rows[i].index > r.rows[i - 1].index);
    CHECK(r.rows[i].partial_sum >= r.rows[i - 1].partial_sum);
  }
  CHECK(parse_series_kind("prop2") == SeriesKind::prop2);
  CHECK_THROWS_AS(parse_series_kind("x"), DomainError);
}
