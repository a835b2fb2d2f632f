#include "lnnd/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "lnnd/errors.hpp"
#include "lnnd/experiments.hpp"
#include "lnnd/gaussian_geometry.hpp"
#include "lnnd/io.hpp"
#include "lnnd/validation.hpp"

namespace lnnd::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

const char* const kVersion = LNND_VERSION;
const char* const kManifestName = "manifest.ini";
const std::vector<std::string> kSubcommands = {"sample", "lnnd",   "sweep",
                                               "formulas", "events", "validate"};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> stringify(double v) { return {format_real(v)}; }
std::vector<std::string> stringify(bool v) { return {v ? "true" : "false"}; }
std::vector<std::string> stringify(const std::string& v) { return {v}; }
template <class T>
  requires std::is_integral_v<T>
std::vector<std::string> stringify(T v) {
  return {std::to_string(v)};
}
template <class T>
std::vector<std::string> stringify(const std::optional<T>& v) {
  return v ? stringify(*v) : std::vector<std::string>{};
}
std::vector<std::string> stringify(const std::vector<double>& v) {
  if (v.empty()) return {};
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_real(v[i]);
  return {s};
}
std::vector<std::string> stringify(const std::vector<std::string>& v) { return v; }

// Every option bound to a variable, so the resolved configuration can be
// written back as a manifest.
class Registry {
 public:
  template <class T>
  CLI::Option* add(CLI::App* app, const std::string& key, T& var, const std::string& help) {
    CLI::Option* opt;
    if constexpr (std::is_same_v<T, bool>) {
      opt = app->add_flag("--" + key, var, help);
    } else {
      opt = app->add_option("--" + key, var, help);
    }
    if constexpr (std::is_same_v<T, std::vector<double>>) opt->delimiter(',');
    if constexpr (!std::is_same_v<T, bool>) opt->capture_default_str();
    entries_.push_back({section_of(app), key, [&var] { return stringify(var); }});
    return opt;
  }

  bool known(const std::string& section, const std::string& key) const {
    for (const auto& e : entries_) {
      if (e.section == section && e.key == key) return true;
    }
    return false;
  }

  std::string render(const std::string& subcommand) const {
    std::ostringstream os;
    os << "# lnnd_lab manifest\n[run]\nsubcommand = " << subcommand << "\nversion = " << kVersion
       << "\n";
    for (const std::string& section : {std::string("global"), subcommand}) {
      os << "\n[" << section << "]\n";
      for (const auto& e : entries_) {
        if (e.section != section) continue;
        for (const auto& v : e.values()) os << e.key << " = " << v << "\n";
      }
    }
    return os.str();
  }

 private:
  struct Entry {
    std::string section;
    std::string key;
    std::function<std::vector<std::string>()> values;
  };
  static std::string section_of(const CLI::App* app) {
    return app->get_parent() ? app->get_name() : "global";
  }
  std::vector<Entry> entries_;
};

std::uint64_t seed_from_env() {
  const char* s = std::getenv("LNND_SEED");
  if (!s || !*s) return 0;
  std::uint64_t v = 0;
  const auto* end = s + std::char_traits<char>::length(s);
  const auto [p, ec] = std::from_chars(s, end, v);
  if (ec != std::errc() || p != end) {
    throw UsageError(std::string("LNND_SEED='") + s + "' is not an unsigned 64-bit integer");
  }
  return v;
}

void write_json(const fs::path& path, const json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

json params_json(const FormulaParams& p) {
  return json{{"d", p.d.value()}, {"c", p.c}, {"t", p.t},  {"u", p.u},
              {"eps", p.eps},     {"a", p.a}, {"C", p.C}};
}

// ---------------------------------------------------------------- formulas

struct Evaluator {
  std::vector<std::string> columns;
  std::function<std::vector<std::optional<double>>(const std::map<std::string, double>&)> eval;
};

double var(const std::map<std::string, double>& v, const std::string& name) { return v.at(name); }

long integer_var(const std::map<std::string, double>& v, const std::string& name) {
  const double x = v.at(name);
  if (x != std::floor(x) || std::fabs(x) > 1e15) {
    throw DomainError(name + " must be an integer, got " + format_real(x));
  }
  return static_cast<long>(x);
}

Dimension dim_var(const std::map<std::string, double>& v) {
  return Dimension(static_cast<int>(integer_var(v, "d")));
}

FormulaParams params_var(const std::map<std::string, double>& v) {
  FormulaParams p;
  p.d = dim_var(v);
  p.c = var(v, "c");
  p.t = var(v, "t");
  p.u = var(v, "u");
  p.eps = var(v, "eps");
  p.a = var(v, "a");
  p.C = var(v, "C");
  return p;
}

using Row = std::vector<std::optional<double>>;

Row value_exact(double value, double exact, double log_ratio) { return {value, exact, log_ratio}; }
Row value_only(double value) { return {value, std::nullopt, std::nullopt}; }

std::map<std::string, Evaluator> evaluators(ConstantVariant variant, ExponentVariant exponent) {
  const std::vector<std::string> std_cols = {"value", "exact", "log_ratio"};
  std::map<std::string, Evaluator> m;
  m["radial_constant"] = {std_cols, [=](const auto& v) {
                            return value_only(radial_constant(dim_var(v), variant));
                          }};
  m["scale_threshold"] = {std_cols, [=](const auto& v) {
                            return value_only(scale_threshold(dim_var(v), var(v, "c")));
                          }};
  m["big_radius"] = {std_cols, [=](const auto& v) {
                       return value_only(big_radius(var(v, "n"), var(v, "c"), dim_var(v), variant));
                     }};
  m["small_radius"] = {std_cols, [=](const auto& v) {
                         return value_only(small_radius(var(v, "n"), var(v, "t")));
                       }};
  m["radial_tail"] = {std_cols, [=](const auto& v) {
                        return value_only(radial_tail(var(v, "R"), dim_var(v)));
                      }};
  m["tail_asym"] = {std_cols, [=](const auto& v) {
                      const Dimension d = dim_var(v);
                      const double R = var(v, "R");
                      const double la = log_tail_asym(R, d, variant);
                      const double le = log_radial_tail(R, d);
                      return value_exact(std::exp(la), std::exp(le), la - le);
                    }};
  m["ball_mass"] = {std_cols, [=](const auto& v) {
                      return value_only(ball_mass(var(v, "rho"), var(v, "r"), dim_var(v)));
                    }};
  m["ball_mass_asym"] = {std_cols, [=](const auto& v) {
                           const Dimension d = dim_var(v);
                           const double la = log_ball_mass_asym(var(v, "rho"), var(v, "r"), d, exponent);
                           const double le = log_ball_mass(var(v, "rho"), var(v, "r"), d);
                           return value_exact(std::exp(la), std::exp(le), la - le);
                         }};
  m["ball_mass_asym_both"] = {
      {"value_as_printed", "value_half_rho_sq", "exact", "log_ratio_as_printed",
       "log_ratio_half_rho_sq"},
      [=](const auto& v) {
        const Dimension d = dim_var(v);
        const double rho = var(v, "rho");
        const double r = var(v, "r");
        const double lp = log_ball_mass_asym(rho, r, d, ExponentVariant::as_printed);
        const double lh = log_ball_mass_asym(rho, r, d, ExponentVariant::half_rho_sq);
        const double le = log_ball_mass(rho, r, d);
        return Row{std::exp(lp), std::exp(lh), std::exp(le), lp - le, lh - le};
      }};
  m["containment_defect"] = {std_cols, [=](const auto& v) {
                               const Dimension d = dim_var(v);
                               const double n = var(v, "n");
                               const double c = var(v, "c");
                               const double full = containment_defect_asym(n, c, d, variant).full;
                               const double R = big_radius(n, c, d, variant);
                               const double exact = -std::expm1(n * std::log1p(-radial_tail(R, d)));
                               return value_exact(full, exact, std::log(full / exact));
                             }};
  m["containment_rate"] = {std_cols, [=](const auto& v) {
                             const Dimension d = dim_var(v);
                             const double n = var(v, "n");
                             const double c = var(v, "c");
                             const double rate = containment_defect_asym(n, c, d, variant).leading_rate;
                             const double R = big_radius(n, c, d, variant);
                             const double exact = -std::expm1(n * std::log1p(-radial_tail(R, d)));
                             return value_exact(rate, exact, std::log(rate / exact));
                           }};
  m["subsequence_rate"] = {std_cols, [=](const auto& v) {
                             const auto s = subsequence_rate(integer_var(v, "k"), var(v, "a"),
                                                             var(v, "c"), dim_var(v), variant);
                             return value_exact(s.model, s.full, std::log(s.model / s.full));
                           }};
  m["covering_count_bound"] = {std_cols, [=](const auto& v) {
                                 return value_only(covering_count_bound(var(v, "m"), dim_var(v)));
                               }};
  m["packing_count_bound"] = {std_cols, [=](const auto& v) {
                                const auto b = packing_count_bound(var(v, "n"), var(v, "c"), var(v, "u"),
                                                                   dim_var(v), variant);
                                return value_exact(b.simplified, b.ratio_form,
                                                   std::log(b.simplified / b.ratio_form));
                              }};
  m["qm"] = {std_cols, [=](const auto& v) {
               const auto q = annulus_prob_qm(integer_var(v, "m"), params_var(v), variant);
               return value_exact(std::exp(q.log_model), std::exp(q.log_exact), -q.log_ratio());
             }};
  m["fm_bound"] = {std_cols, [=](const auto& v) {
                     const auto f = fm_bound(integer_var(v, "m"), params_var(v), variant);
                     return value_exact(f.simplified, f.exact, std::log(f.simplified / f.exact));
                   }};
  m["en_prob"] = {std_cols, [=](const auto& v) {
                    const auto e = en_prob_model(var(v, "n"), params_var(v), variant);
                    return value_exact(e.model, e.exact_form, std::log(e.model) - e.log_exact_form);
                  }};
  m["final_series_term"] = {std_cols, [=](const auto& v) {
                              return value_only(final_series_term(var(v, "n"), var(v, "eps"),
                                                                  dim_var(v), var(v, "C")));
                            }};
  return m;
}

std::map<std::string, double> default_vars() {
  const FormulaParams p;
  return {{"d", 2},   {"n", 1e4},     {"c", p.c}, {"t", p.t}, {"u", p.u},   {"eps", p.eps},
          {"a", p.a}, {"C", p.C},     {"rho", 1}, {"r", 0.5}, {"R", 1},     {"m", 10},
          {"k", 10}};
}

struct GridAxis {
  std::string name;
  std::vector<double> values;
};

double parse_number(const std::string& s, const std::string& what) {
  double v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw UsageError(what + ": '" + s + "' is not a number");
  }
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return parts;
}

GridAxis parse_grid(const std::string& spec, const std::map<std::string, double>& known) {
  const auto eq = spec.find('=');
  const std::string what = "--grid " + spec;
  if (eq == std::string::npos) throw UsageError(what + ": expected VAR=start:stop:count[:log|lin]");
  GridAxis axis{spec.substr(0, eq), {}};
  if (!known.count(axis.name)) throw UsageError(what + ": unknown variable '" + axis.name + "'");
  const auto parts = split(spec.substr(eq + 1), ':');
  if (parts.size() != 3 && parts.size() != 4) {
    throw UsageError(what + ": expected VAR=start:stop:count[:log|lin]");
  }
  const double start = parse_number(parts[0], what);
  const double stop = parse_number(parts[1], what);
  const double count_d = parse_number(parts[2], what);
  if (count_d < 0 || count_d != std::floor(count_d) || count_d > 1e7) {
    throw UsageError(what + ": count must be a nonnegative integer");
  }
  const auto count = static_cast<std::size_t>(count_d);
  const std::string spacing = parts.size() == 4 ? parts[3] : "lin";
  if (spacing != "lin" && spacing != "log") throw UsageError(what + ": spacing must be log or lin");
  if (spacing == "log" && !(start > 0 && stop > 0)) {
    throw UsageError(what + ": log spacing needs positive endpoints");
  }
  for (std::size_t i = 0; i < count; ++i) {
    const double f = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    double x;
    if (spacing == "log") {
      x = std::exp(std::log(start) + f * (std::log(stop) - std::log(start)));
      const double nearest = std::round(x);
      if (std::fabs(x - nearest) <= 1e-9 * std::fabs(x)) x = nearest;
    } else {
      x = start + f * (stop - start);
    }
    axis.values.push_back(x);
  }
  return axis;
}

// ---------------------------------------------------------------- options

struct GlobalOptions {
  int threads = 0;
  std::string config;
};

struct SampleOptions {
  int d = 2;
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;
  std::string process = "binomial";
  std::string out_dir = ".";
  std::string output = "cloud.txt";
};

struct LnndOptions {
  std::string in;
  std::string engine = "fast";
  std::optional<double> annulus_inner;
  std::optional<double> annulus_outer;
  std::string out_dir = ".";
};

struct SweepOptions {
  int d = 2;
  std::vector<double> n_grid = {1e3, 1e4, 1e5};
  std::size_t replicates = 10;
  std::uint64_t seed = 0;
  std::string process = "binomial";
  std::string variant = "normalized";
  double c = 2.0;
  double t_low = 0.0;
  std::optional<double> t_high;
  bool plot = false;
  std::string out_dir = ".";
};

struct FormulasOptions {
  std::string evaluator;
  std::vector<std::string> grid;
  std::vector<std::string> fix;
  std::string variant = "normalized";
  std::string exponent_variant = "half_rho_sq";
  std::string out_dir = ".";
  std::string output = "formulas.csv";
};

struct EventsOptions {
  std::string kind;
  int d = 2;
  std::size_t n = 10000;
  std::size_t replicates = 1000;
  std::uint64_t seed = 0;
  std::string variant = "normalized";
  double c = 2.0;
  double u = 1.1;
  double eps = 0.05;
  double a = 2.0;
  double C = 1.0;
  double rho = 1.0;
  double r_inner = 0.0;
  double r_outer = 0.5;
  long m = 20;
  std::size_t probes = 100000;
  std::size_t probe_count = 1;
  std::string series = "lemma2_upper";
  long horizon = 1000;
  std::string out_dir = ".";
};

struct ValidateOptions {
  std::string suite = "all";
  std::uint64_t seed = validation::Settings{}.seed;
  std::string out_dir = ".";
};

struct Context {
  std::ostream& out;
  std::ostream& err;
  const Registry& registry;
  std::string subcommand;

  fs::path prepare(const std::string& dir) const {
    const fs::path p(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw UsageError("--out-dir " + dir + ": " + ec.message());
    return p;
  }
  void finish(const fs::path& dir) const {
    write_file_atomic(dir / kManifestName, registry.render(subcommand));
  }
};

// ---------------------------------------------------------------- subcommands

int cmd_sample(const SampleOptions& o, const Context& ctx) {
  const Dimension d(o.d);
  PointCloud cloud;
  if (o.process == "binomial") {
    cloud = sample_cloud(d, o.n, o.seed, o.replicate);
  } else if (o.process == "poisson") {
    cloud = poissonize(d, {static_cast<double>(o.n)}, o.seed, o.replicate).cloud(0);
  } else {
    throw UsageError("--process " + o.process + ": expected binomial|poisson");
  }
  const fs::path dir = ctx.prepare(o.out_dir);
  std::ostringstream os;
  write_cloud(os, cloud);
  write_file_atomic(dir / o.output, os.str());
  ctx.finish(dir);
  ctx.out << "wrote " << (dir / o.output).string() << " (" << cloud.size() << " points)\n";
  return kOk;
}

int cmd_lnnd(const LnndOptions& o, const Context& ctx) {
  PointCloud cloud;
  {
    std::istringstream is(read_file(o.in));
    try {
      cloud = read_cloud(is);
    } catch (const std::exception& e) {
      throw UsageError("--in " + o.in + ": " + e.what());
    }
  }
  const auto view = cloud.view();
  if (view.size() < 2) throw UsageError("--in " + o.in + ": need at least 2 points");
  NngResult nng;
  if (o.engine == "fast") nng = build_nng_fast(view);
  else if (o.engine == "brute") nng = build_nng_brute(view);
  else throw UsageError("--engine " + o.engine + ": expected fast|brute");

  json j;
  j["input"] = o.in;
  j["d"] = cloud.d.value();
  j["n"] = view.size();
  j["engine"] = o.engine;
  j["d_n"] = nng.d_n;
  ctx.out << format_real(nng.d_n) << "\n";
  if (o.annulus_inner.has_value() != o.annulus_outer.has_value()) {
    throw UsageError("--annulus-inner and --annulus-outer must be given together");
  }
  if (o.annulus_inner) {
    const AnnulusSpec annulus(*o.annulus_inner, *o.annulus_outer);
    const auto restricted = lnnd_restricted(view, nng, annulus);
    j["annulus"] = {{"inner", *o.annulus_inner}, {"outer", *o.annulus_outer}};
    if (restricted) {
      j["d_n_restricted"] = *restricted;
      ctx.out << "restricted " << format_real(*restricted) << "\n";
    } else {
      j["d_n_restricted"] = nullptr;
      ctx.out << "restricted none\n";
    }
  }
  const fs::path dir = ctx.prepare(o.out_dir);
  write_json(dir / "lnnd.json", j);
  ctx.finish(dir);
  return kOk;
}

const char* kPlotScript = R"(# Ratio sqrt(log n) d_n / log log n against log log n.
import csv, math, sys
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

d = {d}
xs, ys = [], []
with open("records.csv") as f:
    for row in csv.DictReader(f):
        if row["ratio"] not in ("", "nan"):
            xs.append(math.log(math.log(float(row["n"]))))
            ys.append(float(row["ratio"]))
plt.scatter(xs, ys, s=6, alpha=0.5, label="replicates")
plt.axhline(d / math.sqrt(2), color="k", label="d/sqrt2")
plt.axhline((d - 1) / math.sqrt(2), color="k", linestyle="--", label="(d-1)/sqrt2")
plt.xlabel("log log n")
plt.ylabel("sqrt(log n) d_n / log log n")
plt.legend()
plt.savefig(sys.argv[1] if len(sys.argv) > 1 else "ratio.png", dpi=150)
)";

int cmd_sweep(SweepOptions& o, const Context& ctx) {
  SweepConfig cfg;
  cfg.d = Dimension(o.d);
  cfg.n_grid = o.n_grid;
  cfg.replicates = o.replicates;
  cfg.base_seed = o.seed;
  cfg.params.d = cfg.d;
  cfg.params.c = o.c;
  cfg.process = parse_process_kind(o.process);
  cfg.variant = parse_constant_variant(o.variant);
  if (!o.t_high) o.t_high = 2.0 * cfg.d.as_double() / std::numbers::sqrt2;
  try {
    cfg.validate();
  } catch (const DomainError& e) {
    throw UsageError(std::string("sweep: ") + e.what());
  }
  const auto report = strong_law_sweep(cfg);
  const auto envelope = envelope_check(report, o.t_low, *o.t_high);

  CsvWriter records({"n", "replicate", "seed", "points", "d_n", "ratio", "contained", "coupled"});
  for (const auto& r : report.records) {
    records.add(r.n);
    records.add_int(static_cast<long long>(r.replicate));
    records.add(std::to_string(r.seed));
    records.add_int(static_cast<long long>(r.points));
    records.add(r.d_n);
    records.add(r.ratio);
    records.add_int(r.contained);
    records.add_int(r.coupled);
    records.end_row();
  }
  CsvWriter env({"n", "count", "r_lower", "r_upper", "frac_above_lower", "frac_below_upper"});
  for (const auto& e : envelope) {
    env.add(e.n);
    env.add_int(static_cast<long long>(e.count));
    env.add(e.r_lower);
    env.add(e.r_upper);
    env.add(e.above_lower);
    env.add(e.below_upper);
    env.end_row();
  }
  json summary;
  summary["version"] = kVersion;
  summary["config"] = {{"d", o.d},
                       {"n_grid", o.n_grid},
                       {"replicates", o.replicates},
                       {"seed", o.seed},
                       {"process", o.process},
                       {"variant", o.variant},
                       {"c", o.c},
                       {"t_low", o.t_low},
                       {"t_high", *o.t_high}};
  summary["reference_d_over_sqrt2"] = report.reference_d;
  summary["reference_d_minus_1_over_sqrt2"] = report.reference_d_minus;
  json rows = json::array();
  for (const auto& s : report.summaries) {
    rows.push_back({{"n", s.n},       {"count", s.count}, {"missing", s.missing}, {"mean", s.mean},
                    {"median", s.median}, {"min", s.min}, {"max", s.max},         {"q05", s.q05},
                    {"q25", s.q25},   {"q75", s.q75},     {"q95", s.q95}});
  }
  summary["summaries"] = rows;

  const fs::path dir = ctx.prepare(o.out_dir);
  write_file_atomic(dir / "records.csv", records.str());
  write_file_atomic(dir / "envelope.csv", env.str());
  write_json(dir / "summary.json", summary);
  if (o.plot) {
    std::string script = kPlotScript;
    script.replace(script.find("{d}"), 3, std::to_string(o.d));
    write_file_atomic(dir / "plot_ratio.py", script);
  }
  ctx.finish(dir);
  for (const auto& s : report.summaries) {
    ctx.out << "n=" << format_real(s.n) << " median ratio " << format_real(s.median) << " max "
            << format_real(s.max) << "\n";
  }
  ctx.err << "sweep: " << report.records.size() << " records in " << report.wall_seconds << " s\n";
  return kOk;
}

int cmd_formulas(const FormulasOptions& o, const Context& ctx) {
  const auto variant = parse_constant_variant(o.variant);
  const auto exponent = parse_exponent_variant(o.exponent_variant);
  const auto table = evaluators(variant, exponent);
  const auto it = table.find(o.evaluator);
  if (it == table.end()) {
    std::string names;
    for (const auto& [name, _] : table) names += (names.empty() ? "" : "|") + name;
    throw UsageError("--evaluator '" + o.evaluator + "': expected one of " + names);
  }
  auto vars = default_vars();
  for (const auto& f : o.fix) {
    const auto eq = f.find('=');
    if (eq == std::string::npos) throw UsageError("--fix " + f + ": expected VAR=VALUE");
    const std::string name = f.substr(0, eq);
    if (!vars.count(name)) throw UsageError("--fix " + f + ": unknown variable '" + name + "'");
    vars[name] = parse_number(f.substr(eq + 1), "--fix " + f);
  }
  std::vector<GridAxis> axes;
  std::set<std::string> seen;
  for (const auto& g : o.grid) {
    axes.push_back(parse_grid(g, vars));
    if (!seen.insert(axes.back().name).second) {
      throw UsageError("--grid " + g + ": variable given twice");
    }
  }

  std::vector<std::string> header;
  for (const auto& a : axes) header.push_back(a.name);
  for (const auto& c : it->second.columns) header.push_back(c);
  CsvWriter csv(header);
  std::size_t total = 1;
  for (const auto& a : axes) total *= a.values.size();
  std::vector<std::size_t> idx(axes.size(), 0);
  for (std::size_t row = 0; row < total; ++row) {
    for (std::size_t k = 0; k < axes.size(); ++k) vars[axes[k].name] = axes[k].values[idx[k]];
    Row values;
    try {
      values = it->second.eval(vars);
    } catch (const DomainError& e) {
      std::string at;
      for (const auto& a : axes) at += " " + a.name + "=" + format_real(vars[a.name]);
      throw DomainError(o.evaluator + " at" + at + ": " + e.what());
    }
    for (const auto& a : axes) csv.add(vars[a.name]);
    for (const auto& v : values) {
      if (v) csv.add(*v);
      else csv.add(std::string());
    }
    csv.end_row();
    for (std::size_t k = axes.size(); k-- > 0;) {
      if (++idx[k] < axes[k].values.size()) break;
      idx[k] = 0;
    }
  }
  const fs::path dir = ctx.prepare(o.out_dir);
  write_file_atomic(dir / o.output, csv.str());
  ctx.finish(dir);
  ctx.out << "wrote " << (dir / o.output).string() << " (" << total << " rows)\n";
  return kOk;
}

int cmd_events(const EventsOptions& o, const Context& ctx) {
  const Dimension d(o.d);
  const auto variant = parse_constant_variant(o.variant);
  FormulaParams p;
  p.d = d;
  p.c = o.c;
  p.u = o.u;
  p.eps = o.eps;
  p.a = o.a;
  p.C = o.C;
  json j;
  j["version"] = kVersion;
  j["kind"] = o.kind;
  std::vector<std::pair<std::string, std::string>> tables;

  if (o.kind == "containment") {
    const auto r = containment_experiment(o.n, o.c, d, o.replicates, o.seed, variant);
    j["result"] = {{"n", r.n},
                   {"c", r.c},
                   {"replicates", r.replicates},
                   {"radius", r.radius},
                   {"inside_count", r.inside_count},
                   {"empirical_inside", r.empirical_inside},
                   {"exact_inside", r.exact_inside},
                   {"empirical_outside", r.empirical_outside},
                   {"exact_outside", r.exact_outside},
                   {"asym_outside", r.asym.full},
                   {"asym_leading_rate", r.asym.leading_rate},
                   {"standard_error", r.standard_error},
                   {"z", r.z()}};
    ctx.out << "containment: empirical " << format_real(r.empirical_inside) << " exact "
            << format_real(r.exact_inside) << " z " << format_real(r.z()) << "\n";
  } else if (o.kind == "vacancy") {
    const auto r = vacancy_experiment(o.n, o.rho, o.r_inner, o.r_outer, d, o.replicates, o.seed);
    j["result"] = {{"n", r.n},
                   {"replicates", r.replicates},
                   {"rho", o.rho},
                   {"r_inner", o.r_inner},
                   {"r_outer", o.r_outer},
                   {"annulus_mass", r.annulus_mass},
                   {"empirical", r.empirical},
                   {"exact", r.exact},
                   {"standard_error", r.standard_error},
                   {"z", r.z()}};
    ctx.out << "vacancy: empirical " << format_real(r.empirical) << " exact "
            << format_real(r.exact) << " z " << format_real(r.z()) << "\n";
  } else if (o.kind == "en") {
    const auto r = en_event_experiment(o.n, p, o.probe_count, o.replicates, o.seed, variant);
    j["result"] = {{"n", r.n},
                   {"replicates", r.replicates},
                   {"params", params_json(p)},
                   {"r_eps", r.r_eps},
                   {"r_u", r.r_u},
                   {"annulus_inner", r.annulus_inner},
                   {"annulus_outer", r.annulus_outer},
                   {"coupling_failure_rate", r.coupling_failure_rate}};
    json cov = json::array();
    for (const auto& c : r.covariances) {
      cov.push_back({{"first", c.first},
                     {"second", c.second},
                     {"covariance", c.test.covariance},
                     {"standard_error", c.test.standard_error},
                     {"z", c.test.z()}});
    }
    j["result"]["covariances"] = cov;
    CsvWriter csv({"probe", "rho", "exact", "hits", "empirical", "standard_error", "z"});
    for (const auto& row : r.rows) {
      csv.add_int(static_cast<long long>(row.probe));
      csv.add(row.rho);
      csv.add(row.exact);
      csv.add_int(static_cast<long long>(row.hits));
      csv.add(row.empirical);
      csv.add(row.standard_error);
      csv.add(row.z());
      csv.end_row();
      ctx.out << "probe " << row.probe << ": empirical " << format_real(row.empirical)
              << " exact " << format_real(row.exact) << " z " << format_real(row.z()) << "\n";
    }
    tables.emplace_back("en_probes.csv", csv.str());
  } else if (o.kind == "packing") {
    const auto r = packing_construction(static_cast<double>(o.n), p, variant);
    j["result"] = {{"n", o.n},
                   {"params", params_json(p)},
                   {"count", r.count},
                   {"spacing", r.spacing},
                   {"annulus_inner", r.annulus_inner},
                   {"annulus_outer", r.annulus_outer},
                   {"bound_ratio_form", r.bound.ratio_form},
                   {"bound_simplified", r.bound.simplified}};
    std::vector<std::string> header;
    for (int k = 0; k < o.d; ++k) header.push_back("x" + std::to_string(k + 1));
    CsvWriter csv(header);
    const auto dim = static_cast<std::size_t>(o.d);
    for (std::size_t i = 0; i < r.count; ++i) {
      for (std::size_t k = 0; k < dim; ++k) csv.add(r.centers[i * dim + k]);
      csv.end_row();
    }
    tables.emplace_back("packing_centers.csv", csv.str());
    ctx.out << "packing: " << r.count << " centers, simplified bound "
            << format_real(r.bound.simplified) << "\n";
  } else if (o.kind == "covering") {
    const auto r = covering_construction(o.m, p, variant, o.probes, o.seed);
    j["result"] = {{"m", o.m},
                   {"params", params_json(p)},
                   {"count", r.count},
                   {"ball_radius", r.ball_radius},
                   {"domain_radius", r.domain_radius},
                   {"bound", r.bound},
                   {"probes", r.probes},
                   {"uncovered_probes", r.uncovered_probes}};
    ctx.out << "covering: " << r.count << " centers, bound " << format_real(r.bound) << ", "
            << r.uncovered_probes << " uncovered probes\n";
  } else if (o.kind == "gumbel") {
    const auto r = gumbel_fit_experiment(o.n, d, o.replicates, o.seed);
    j["result"] = {{"n", r.n},
                   {"d", o.d},
                   {"replicates", r.replicates},
                   {"location", r.fit.location},
                   {"scale", r.fit.scale},
                   {"centering", r.centering},
                   {"location_minus_centering", r.location_minus_centering},
                   {"ks_distance", r.ks_distance},
                   {"ks_critical_1pct", r.ks_critical}};
    CsvWriter csv({"replicate", "d_n", "scaled"});
    for (std::size_t i = 0; i < r.d_n.size(); ++i) {
      csv.add_int(static_cast<long long>(i));
      csv.add(r.d_n[i]);
      csv.add(r.scaled[i]);
      csv.end_row();
    }
    tables.emplace_back("gumbel_samples.csv", csv.str());
    ctx.out << "gumbel: location-centering " << format_real(r.location_minus_centering)
            << " scale " << format_real(r.fit.scale) << " KS " << format_real(r.ks_distance)
            << " (1% critical " << format_real(r.ks_critical) << ")\n";
  } else if (o.kind == "summability") {
    const auto kind = parse_series_kind(o.series);
    const auto r = summability_diagnostics(kind, p, o.horizon, variant);
    j["result"] = {{"series", o.series},
                   {"params", params_json(p)},
                   {"first_index", r.first_index},
                   {"horizon", r.horizon},
                   {"last_decade_sum", r.last_decade_sum},
                   {"previous_decade_sum", r.previous_decade_sum},
                   {"tail_decade_ratio", r.tail_decade_ratio},
                   {"at_threshold", r.at_threshold},
                   {"verdict", to_string(r.verdict)}};
    CsvWriter csv({"index", "term", "partial_sum"});
    for (const auto& row : r.rows) {
      csv.add_int(row.index);
      csv.add(row.term);
      csv.add(row.partial_sum);
      csv.end_row();
    }
    tables.emplace_back("series.csv", csv.str());
    ctx.out << o.series << ": tail-decade ratio " << format_real(r.tail_decade_ratio) << " -> "
            << to_string(r.verdict) << "\n";
  } else {
    throw UsageError("--kind '" + o.kind +
                     "': expected containment|vacancy|en|packing|covering|gumbel|summability");
  }
  const fs::path dir = ctx.prepare(o.out_dir);
  for (const auto& [name, contents] : tables) write_file_atomic(dir / name, contents);
  write_json(dir / "events.json", j);
  ctx.finish(dir);
  return kOk;
}

int cmd_validate(const ValidateOptions& o, const Context& ctx) {
  validation::Settings settings;
  settings.seed = o.seed;
  std::vector<validation::Suite> chosen;
  for (const auto& s : validation::suites()) {
    if (o.suite == "all" || o.suite == s.name) chosen.push_back(s);
  }
  if (chosen.empty()) {
    std::string names = "all";
    for (const auto& s : validation::suites()) names += "|" + s.name;
    throw UsageError("--suite '" + o.suite + "': expected " + names);
  }
  bool all_passed = true;
  std::string log;
  for (const auto& s : chosen) {
    const auto r = s.run(settings);
    const std::string line = validation::format_result(r);
    ctx.out << line << "\n" << std::flush;
    log += line + "\n";
    all_passed = all_passed && r.passed;
  }
  const fs::path dir = ctx.prepare(o.out_dir);
  write_file_atomic(dir / "validation.txt", log);
  ctx.finish(dir);
  return all_passed ? kOk : kStatistical;
}

// ---------------------------------------------------------------- manifest expansion

std::string option_key(const std::string& token) {
  if (token.rfind("--", 0) != 0 || token.size() <= 2) return {};
  const auto eq = token.find('=');
  return token.substr(2, eq == std::string::npos ? std::string::npos : eq - 2);
}

// Rewrites `--config FILE` into explicit tokens: the manifest supplies every
// key the command line does not.
std::vector<std::string> expand_config(const std::vector<std::string>& args, const Registry& reg,
                                       std::ostream& err) {
  std::vector<std::string> user;
  std::optional<std::string> config;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a file argument");
      config = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config = args[i].substr(9);
    } else {
      user.push_back(args[i]);
    }
  }
  if (!config) return args;

  Manifest manifest;
  try {
    manifest = Manifest::parse(read_file(*config), *config);
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    throw UsageError("--config " + *config + ": " + e.what());
  }
  const auto subs = manifest.values("run", "subcommand");
  if (subs.size() != 1) throw UsageError(*config + ": [run] needs exactly one subcommand key");
  const std::string sub = subs.front();
  if (std::find(kSubcommands.begin(), kSubcommands.end(), sub) == kSubcommands.end()) {
    throw UsageError(*config + ": unknown subcommand '" + sub + "'");
  }

  // Drop a repeated subcommand name from the user tokens.
  for (std::size_t i = 0; i < user.size(); ++i) {
    if (user[i].rfind("-", 0) == 0) {
      if (user[i].find('=') == std::string::npos && i + 1 < user.size()) ++i;
      continue;
    }
    if (std::find(kSubcommands.begin(), kSubcommands.end(), user[i]) != kSubcommands.end()) {
      if (user[i] != sub) {
        throw UsageError("subcommand '" + user[i] + "' conflicts with " + *config + " ('" + sub + "')");
      }
      user.erase(user.begin() + static_cast<long>(i));
    }
    break;
  }
  std::set<std::string> given;
  for (const auto& t : user) {
    const auto k = option_key(t);
    if (!k.empty()) given.insert(k);
  }

  std::vector<std::string> tokens = {sub};
  for (const auto& e : manifest.entries) {
    if (e.section == "run") {
      if (e.key == "version" && e.value != kVersion) {
        err << "lnnd_lab: warning: " << *config << " was written by version " << e.value
            << ", running " << kVersion << "\n";
      } else if (e.key != "subcommand" && e.key != "version") {
        throw UsageError(*config + ": unknown key '" + e.key + "' in [run]");
      }
      continue;
    }
    if (e.section != "global" && e.section != sub) {
      throw UsageError(*config + ": section [" + e.section + "] does not match subcommand " + sub);
    }
    if (!reg.known(e.section, e.key)) {
      throw UsageError(*config + ": unknown key '" + e.key + "' in [" + e.section + "]");
    }
    if (given.count(e.key)) continue;
    tokens.push_back("--" + e.key + "=" + e.value);
  }
  tokens.insert(tokens.end(), user.begin(), user.end());
  return tokens;
}

int run_impl(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Largest nearest-neighbor distance laboratory for Gaussian samples", "lnnd_lab"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();
  Registry reg;

  GlobalOptions global;
  reg.add(&app, "threads", global.threads, "Worker thread cap (0: OpenMP default)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--config", global.config,
                 "Manifest file; its keys are defaults that flags override");

  const std::uint64_t env_seed = seed_from_env();
  const std::string variant_help = "Radial constant: paper|normalized";

  SampleOptions sample;
  sample.seed = env_seed;
  auto* s_sample = app.add_subcommand("sample", "Draw a Gaussian point cloud and write a dump");
  reg.add(s_sample, "d", sample.d, "Dimension (>= 2)");
  reg.add(s_sample, "n", sample.n, "Number of points (Poisson mean for --process poisson)");
  reg.add(s_sample, "seed", sample.seed, "Base seed (default: $LNND_SEED or 0)");
  reg.add(s_sample, "replicate", sample.replicate, "Replicate index");
  reg.add(s_sample, "process", sample.process, "binomial|poisson");
  reg.add(s_sample, "out-dir", sample.out_dir, "Output directory");
  reg.add(s_sample, "output", sample.output, "Dump file name inside --out-dir");

  LnndOptions lnnd_opts;
  auto* s_lnnd = app.add_subcommand("lnnd", "Compute d_n of a point dump");
  reg.add(s_lnnd, "in", lnnd_opts.in, "Point dump")->required();
  reg.add(s_lnnd, "engine", lnnd_opts.engine, "fast|brute");
  reg.add(s_lnnd, "annulus-inner", lnnd_opts.annulus_inner, "Inner radius for the restricted LNND");
  reg.add(s_lnnd, "annulus-outer", lnnd_opts.annulus_outer, "Outer radius for the restricted LNND");
  reg.add(s_lnnd, "out-dir", lnnd_opts.out_dir, "Output directory");

  SweepOptions sweep;
  sweep.seed = env_seed;
  auto* s_sweep = app.add_subcommand("sweep", "Ratio sweep over an n grid");
  reg.add(s_sweep, "d", sweep.d, "Dimension (>= 2)");
  reg.add(s_sweep, "n-grid", sweep.n_grid, "Comma-separated increasing integers >= 16");
  reg.add(s_sweep, "replicates", sweep.replicates, "Replicates per n")->check(CLI::PositiveNumber);
  reg.add(s_sweep, "seed", sweep.seed, "Base seed (default: $LNND_SEED or 0)");
  reg.add(s_sweep, "process", sweep.process, "binomial|poisson|coupled");
  reg.add(s_sweep, "variant", sweep.variant, variant_help);
  reg.add(s_sweep, "c", sweep.c, "Containment constant for the contained flag");
  reg.add(s_sweep, "t-low", sweep.t_low, "Lower envelope scale");
  reg.add(s_sweep, "t-high", sweep.t_high, "Upper envelope scale (default 2d/sqrt2)");
  reg.add(s_sweep, "plot", sweep.plot, "Also write plot_ratio.py");
  reg.add(s_sweep, "out-dir", sweep.out_dir, "Output directory");

  FormulasOptions formulas;
  auto* s_formulas = app.add_subcommand("formulas", "Tabulate a formula evaluator over a grid");
  reg.add(s_formulas, "evaluator", formulas.evaluator, "Evaluator name")->required();
  reg.add(s_formulas, "grid", formulas.grid, "VAR=start:stop:count[:log|lin] (repeatable)");
  reg.add(s_formulas, "fix", formulas.fix, "VAR=VALUE (repeatable)");
  reg.add(s_formulas, "variant", formulas.variant, variant_help);
  reg.add(s_formulas, "exponent-variant", formulas.exponent_variant, "as_printed|half_rho_sq");
  reg.add(s_formulas, "out-dir", formulas.out_dir, "Output directory");
  reg.add(s_formulas, "output", formulas.output, "CSV file name inside --out-dir");

  EventsOptions events;
  events.seed = env_seed;
  auto* s_events = app.add_subcommand("events", "Event-probability experiments and constructions");
  reg.add(s_events, "kind", events.kind,
          "containment|vacancy|en|packing|covering|gumbel|summability")
      ->required();
  reg.add(s_events, "d", events.d, "Dimension (>= 2)");
  reg.add(s_events, "n", events.n, "Sample size");
  reg.add(s_events, "replicates", events.replicates, "Replicates");
  reg.add(s_events, "seed", events.seed, "Base seed (default: $LNND_SEED or 0)");
  reg.add(s_events, "variant", events.variant, variant_help);
  reg.add(s_events, "c", events.c, "Containment constant");
  reg.add(s_events, "u", events.u, "Outer scale u");
  reg.add(s_events, "eps", events.eps, "Inner scale eps");
  reg.add(s_events, "a", events.a, "Subsequence base");
  reg.add(s_events, "C", events.C, "Series constant");
  reg.add(s_events, "rho", events.rho, "Vacancy center distance");
  reg.add(s_events, "r-inner", events.r_inner, "Vacancy inner radius");
  reg.add(s_events, "r-outer", events.r_outer, "Vacancy outer radius");
  reg.add(s_events, "m", events.m, "Covering index");
  reg.add(s_events, "probes", events.probes, "Coverage probes");
  reg.add(s_events, "probe-count", events.probe_count, "Packing centers used as E_n probes");
  reg.add(s_events, "series", events.series, "lemma2_upper|lemma2_lower|prop1|prop2");
  reg.add(s_events, "horizon", events.horizon, "Series horizon (>= 100)");
  reg.add(s_events, "out-dir", events.out_dir, "Output directory");

  ValidateOptions validate;
  auto* s_validate = app.add_subcommand("validate", "Run acceptance checks");
  reg.add(s_validate, "suite", validate.suite,
          "all|special|ballmass|lemma1|engine|performance|containment|en|envelope|gumbel|summability");
  reg.add(s_validate, "seed", validate.seed, "Seed for the Monte Carlo checks");
  reg.add(s_validate, "out-dir", validate.out_dir, "Output directory");

  std::vector<std::string> tokens = expand_config(args, reg, err);
  std::reverse(tokens.begin(), tokens.end());
  try {
    app.parse(tokens);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }
  if (global.threads > 0) omp_set_num_threads(global.threads);

  auto* sub = app.get_subcommands().front();
  const Context ctx{out, err, reg, sub->get_name()};
  const std::string name = sub->get_name();
  try {
    if (name == "sample") return cmd_sample(sample, ctx);
    if (name == "lnnd") return cmd_lnnd(lnnd_opts, ctx);
    if (name == "sweep") return cmd_sweep(sweep, ctx);
    if (name == "formulas") return cmd_formulas(formulas, ctx);
    if (name == "events") return cmd_events(events, ctx);
    return cmd_validate(validate, ctx);
  } catch (const DomainError& e) {
    throw UsageError(name + ": " + e.what());
  }
}

}  // namespace

Manifest Manifest::parse(const std::string& text, const std::string& origin) {
  Manifest m;
  std::string section;
  std::istringstream is(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') throw UsageError(where + ": malformed section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (section.empty()) throw UsageError(where + ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(where + ": expected key = value");
    if (section.empty()) throw UsageError(where + ": key outside of a section");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    if (key.empty()) throw UsageError(where + ": empty key");
    m.entries.push_back({section, key, trim(std::string_view(line).substr(eq + 1))});
  }
  return m;
}

std::vector<std::string> Manifest::values(const std::string& section, const std::string& key) const {
  std::vector<std::string> out;
  for (const auto& e : entries) {
    if (e.section == section && e.key == key) out.push_back(e.value);
  }
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return run_impl(args, out, err);
  } catch (const ConvergenceError& e) {
    err << "lnnd_lab: convergence failure: " << e.what() << "\n";
    return kConvergence;
  } catch (const UnderflowError& e) {
    err << "lnnd_lab: numerical failure: " << e.what() << "\n";
    return kConvergence;
  } catch (const std::exception& e) {
    err << "lnnd_lab: error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace lnnd::cli
