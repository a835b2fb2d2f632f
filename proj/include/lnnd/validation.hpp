#pragma once

// Acceptance checks. Each returns one result line; the CLI `validate`
// subcommand and the acceptance binary both run these.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace lnnd::validation {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0;
};

/// Tolerances are part of the settings and are echoed in every detail line.
struct Settings {
  std::uint64_t seed = 20240601;
  double tail_rel_tol = 1e-9;
  double ballmass_sigma = 4.0;
  std::size_t ballmass_samples = 1000000;
  double asym_ratio_lo = 0.75;
  double asym_ratio_hi = 1.25;
  double exponent_gap_log = 100.0;
  std::size_t engine_instances = 200;
  double perf_limit_1e6 = 60.0;
  double perf_limit_1e7 = 900.0;
  bool perf_include_1e7 = true;
  std::size_t containment_replicates = 2000;
  double containment_sigma = 3.0;
  std::size_t en_replicates = 10000;
  double en_sigma = 3.0;
  double covariance_sigma = 4.0;
  std::size_t envelope_replicates = 100;
  std::size_t ratio_replicates = 30;
  double ratio_lo = 0.4;
  double ratio_hi = 3.5;
  double median_lo = 0.8;
  double median_hi = 1.5;
  std::size_t gumbel_replicates = 500;
};

CriterionResult special_functions(const Settings& s);  // 1
CriterionResult ball_mass_monte_carlo(const Settings& s);  // 2
CriterionResult ball_mass_asym_regime(const Settings& s);  // 3
CriterionResult engine_equivalence(const Settings& s);  // 4
CriterionResult performance(const Settings& s);  // 5
CriterionResult containment(const Settings& s);  // 6
CriterionResult en_events(const Settings& s);  // 7
CriterionResult desk_scale_strong_law(const Settings& s);  // 8
CriterionResult gumbel_fit(const Settings& s);  // 9
CriterionResult summability(const Settings& s);  // 10

struct Suite {
  std::string name;
  std::function<CriterionResult(const Settings&)> run;
};

/// Suites in criterion order: special, ballmass, lemma1, engine, performance,
/// containment, en, envelope, gumbel, summability.
const std::vector<Suite>& suites();

/// Formats "[PASS] 3 name (1.2 s): detail".
std::string format_result(const CriterionResult& r);

}  // namespace lnnd::validation
