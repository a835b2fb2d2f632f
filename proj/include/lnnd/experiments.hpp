#pragma once

// Monte Carlo harness connecting the samplers, the nearest-neighbor engine and
// the formula evaluators. Every experiment is a pure function of its inputs
// and base seed: replicate r draws from streams keyed by (seed, r, role), and
// results are assembled in (n, replicate) order, so outputs do not depend on
// the number of threads.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lnnd/asymptotics.hpp"
#include "lnnd/nng.hpp"
#include "lnnd/stats.hpp"

namespace lnnd {

/// sqrt(log n) d_n / log log n.
double lnnd_ratio(double n, double d_n);

enum class ProcessKind { binomial, poisson, coupled };
const char* to_string(ProcessKind p);
ProcessKind parse_process_kind(const std::string& s);

struct SweepConfig {
  Dimension d{2};
  std::vector<double> n_grid;
  std::size_t replicates = 1;
  std::uint64_t base_seed = 0;
  FormulaParams params;
  ProcessKind process = ProcessKind::binomial;
  ConstantVariant variant = ConstantVariant::normalized;

  /// Throws DomainError: grid entries must be integers >= 16 and increasing,
  /// replicates >= 1, params.d == d.
  void validate() const;
};

struct SweepRecord {
  double n = 0;
  std::uint64_t replicate = 0;
  std::uint64_t seed = 0;
  std::size_t points = 0;
  double d_n = 0;    // NaN when the cloud has fewer than two points
  double ratio = 0;  // NaN likewise
  bool contained = false;  // every point inside B(0, R_n(c))
  bool coupled = true;     // H_n; always true outside the coupled process
};

struct RatioSummary {
  double n = 0;
  std::size_t count = 0;
  std::size_t missing = 0;
  double mean = 0, median = 0, min = 0, max = 0;
  double q05 = 0, q25 = 0, q75 = 0, q95 = 0;
};

struct ExperimentReport {
  SweepConfig config;
  std::vector<SweepRecord> records;  // sorted by (n, replicate)
  std::vector<RatioSummary> summaries;
  double reference_d = 0;        // d / sqrt 2
  double reference_d_minus = 0;  // (d - 1) / sqrt 2
  double wall_seconds = 0;
};

/// For each replicate, draw one point sequence (or Poisson family, or coupled
/// counts) and compute d_n exactly at every n in the grid. Along a replicate
/// the clouds are nested, so each replicate is one realization of the
/// sequence n -> d_n.
ExperimentReport strong_law_sweep(const SweepConfig& config);

/// Summaries recomputed from records (used by the sweep; exposed so that
/// order-independence can be checked).
std::vector<RatioSummary> summarize(const std::vector<SweepRecord>& records,
                                    const std::vector<double>& n_grid);

struct EnvelopeRow {
  double n = 0;
  std::size_t count = 0;
  double r_upper = 0;      // r_n(t_high)
  double r_lower = 0;      // r_n(t_low)
  double below_upper = 0;  // fraction with d_n < r_n(t_high)
  double above_lower = 0;  // fraction with d_n >= r_n(t_low)
};
std::vector<EnvelopeRow> envelope_check(const ExperimentReport& report, double t_low,
                                        double t_high);

struct ContainmentResult {
  std::size_t n = 0;
  double c = 0;
  std::size_t replicates = 0;
  double radius = 0;             // R_n(c)
  std::size_t inside_count = 0;  // replicates where U_n(c) held
  double empirical_inside = 0;
  double exact_inside = 0;       // (1 - radial_tail(R_n(c)))^n
  double empirical_outside = 0;  // frequency of V_n(c)
  double exact_outside = 0;
  ContainmentDefect asym{};      // asymptotic P[U_n^c]
  double standard_error = 0;     // binomial, at the exact probability
  double z() const;
};

/// Frequency of U_n(c) = {X_n inside B(0, R_n(c))} over replicates. Points are
/// generated and tested on the fly; no cloud is stored.
ContainmentResult containment_experiment(std::size_t n, double c, Dimension d,
                                         std::size_t replicates, std::uint64_t seed,
                                         ConstantVariant variant = ConstantVariant::normalized);

struct VacancyResult {
  std::size_t n = 0;
  std::size_t replicates = 0;
  double annulus_mass = 0;  // p = I(rho, outer) - I(rho, inner)
  double empirical = 0;     // frequency of an empty annulus
  double exact = 0;         // (1 - p)^n
  double standard_error = 0;
  double z() const;
};

/// Empty-annulus frequency for a binomial cloud around the center rho e_1.
VacancyResult vacancy_experiment(std::size_t n, double rho, double r_inner, double r_outer,
                                 Dimension d, std::size_t replicates, std::uint64_t seed);

struct PackingResult {
  std::vector<double> centers;  // row-major
  std::size_t count = 0;
  double spacing = 0;        // 2 r_n(u); minimum pairwise center distance
  double annulus_inner = 0;  // R_n(-2)
  double annulus_outer = 0;  // R_n(c)
  PackingBound bound{};
};

/// Lattice packing of A_n = B(0, R_n(c)) \ B(0, R_n(-2)) by disjoint balls of
/// radius r_n(u): centers are the points of (R_n(-2) e_1) + 2 r_n(u) Z^d lying
/// in A_n, ordered with the anchor R_n(-2) e_1 first and then by norm. The
/// count is about omega_d / 2^d (pi/4 in the plane) of the ratio-form bound.
PackingResult packing_construction(double n, const FormulaParams& params,
                                   ConstantVariant variant = ConstantVariant::normalized);

struct CoveringResult {
  std::vector<double> centers;
  std::size_t count = 0;
  double ball_radius = 0;    // r_{nu(m)}(eps)
  double domain_radius = 0;  // R_{nu(m+1)}(c)
  double bound = 0;          // (m / log m)^d
  std::size_t probes = 0;
  std::size_t uncovered_probes = 0;
  bool covered() const { return uncovered_probes == 0; }
};

/// Cubic-lattice covering of B(0, R_{nu(m+1)}(c)) by balls of radius
/// r_{nu(m)}(eps): lattice spacing 2r / sqrt d, keeping every cell that meets
/// the domain. Coverage is verified with `probes` uniform points in the domain.
CoveringResult covering_construction(long m, const FormulaParams& params,
                                     ConstantVariant variant = ConstantVariant::normalized,
                                     std::size_t probes = 100000, std::uint64_t seed = 0);

struct EnProbeRow {
  std::size_t probe = 0;
  double rho = 0;
  double exact = 0;  // (n - n^{3/4}) I(x, r_n(eps)) exp(-(n + n^{3/4}) I(x, r_n(u)))
  std::size_t hits = 0;
  double empirical = 0;
  double standard_error = 0;
  double z() const;
};

struct CovarianceRow {
  std::string first;
  std::string second;
  stats::CovarianceTest test;
};

struct EnEventReport {
  std::size_t n = 0;
  std::size_t replicates = 0;
  FormulaParams params;
  double r_eps = 0;  // r_n(eps)
  double r_u = 0;    // r_n(u)
  double annulus_inner = 0;
  double annulus_outer = 0;
  std::vector<EnProbeRow> rows;
  std::vector<CovarianceRow> covariances;  // four region counts at probe 0
  double coupling_failure_rate = 0;        // frequency of H_n^c
};

/// Simulates coupled triples and measures P[E_n(x)] at the first
/// `probe_count` packing centers (probe 0 sits at rho = R_n(-2)).
EnEventReport en_event_experiment(std::size_t n, const FormulaParams& params,
                                  std::size_t probe_count, std::size_t replicates,
                                  std::uint64_t seed,
                                  ConstantVariant variant = ConstantVariant::normalized);

struct GumbelReport {
  std::size_t n = 0;
  Dimension d{2};
  std::size_t replicates = 0;
  std::vector<double> d_n;
  std::vector<double> scaled;   // sqrt(2 log n) d_n
  stats::GumbelParams fit{};
  double centering = 0;         // (d - 1) log log n
  double location_minus_centering = 0;
  double ks_distance = 0;       // standardized sample vs standard Gumbel
  double ks_critical = 0;       // 1% level
};

/// Throws DomainError for fewer than two replicates.
GumbelReport gumbel_fit_experiment(std::size_t n, Dimension d, std::size_t replicates,
                                   std::uint64_t seed);

enum class SeriesKind { lemma2_upper, lemma2_lower, prop1, prop2 };
const char* to_string(SeriesKind k);
SeriesKind parse_series_kind(const std::string& s);

enum class Verdict { summable, divergent, inconclusive };
const char* to_string(Verdict v);

struct SeriesRow {
  long index = 0;
  double term = 0;
  double partial_sum = 0;
};

struct SummabilityReport {
  SeriesKind kind{};
  long first_index = 0;
  long horizon = 0;
  std::vector<SeriesRow> rows;  // checkpoints: every index up to 100, then ~50 per decade
  double last_decade_sum = 0;      // indices in (horizon/10, horizon]
  double previous_decade_sum = 0;  // indices in (horizon/100, horizon/10]
  double tail_decade_ratio = 0;
  bool at_threshold = false;
  Verdict verdict = Verdict::inconclusive;
};

/// Decade-ratio thresholds: below kSummableRatio is summable, at or above
/// kDivergentRatio is divergent; in between, or exactly at the parameter
/// threshold (c = 2, c = 0, u = (2d+c-2)/(2 sqrt 2), eps = 0), inconclusive.
inline constexpr double kSummableRatio = 0.9;
inline constexpr double kDivergentRatio = 1.0;

/// Partial sums of the Borel-Cantelli series:
///  lemma2_upper  A a^{k+1} R_{a^k}(c)^{d-2} e^{-R^2/2}            (k)
///  lemma2_lower  exp(-A a^k R_{a^{k+1}}(c)^{d-2} e^{-R^2/2})       (k)
///  prop1         (m / log m)^d exp(-C (log m)^{(d-1)/2} / m^{e})   (m)
///  prop2         exp(-C (log n)^{eps sqrt 2 + 1} / (log log n)^{(d-1)/2})  (n)
/// Requires horizon >= 100.
SummabilityReport summability_diagnostics(SeriesKind kind, const FormulaParams& params,
                                          long horizon,
                                          ConstantVariant variant = ConstantVariant::normalized);

}  // namespace lnnd
