#include "lnnd/point_process.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "lnnd/errors.hpp"
#include "lnnd/io.hpp"

namespace lnnd {

PointsView::PointsView(Dimension d, std::span<const double> coords) : d_(d), coords_(coords) {
  if (coords.size() % static_cast<std::size_t>(d.value()) != 0) {
    throw DomainError("coordinate count " + std::to_string(coords.size()) +
                      " is not a multiple of d = " + std::to_string(d.value()));
  }
}

PointsView PointsView::prefix(std::size_t count) const {
  if (count > size()) {
    throw DomainError("prefix of " + std::to_string(count) + " points requested from " +
                      std::to_string(size()));
  }
  return PointsView(d_, coords_.first(count * static_cast<std::size_t>(d_.value())));
}

const char* to_string(CloudKind k) {
  switch (k) {
    case CloudKind::binomial: return "binomial";
    case CloudKind::poisson: return "poisson";
    case CloudKind::coupled_component: return "coupled-component";
  }
  return "?";
}

CloudKind parse_cloud_kind(const std::string& s) {
  if (s == "binomial") return CloudKind::binomial;
  if (s == "poisson") return CloudKind::poisson;
  if (s == "coupled-component") return CloudKind::coupled_component;
  throw DomainError("unknown cloud kind '" + s + "'");
}

std::vector<double> sample_gaussian_points(Dimension d, const StreamKey& stream,
                                           std::size_t first, std::size_t count) {
  const auto dim = static_cast<std::size_t>(d.value());
  std::vector<double> coords(count * dim);
  const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(static) if (n > 20000)
  for (long long i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    PhiloxEngine engine(stream, first + idx);
    std::normal_distribution<double> normal;
    for (std::size_t k = 0; k < dim; ++k) coords[idx * dim + k] = normal(engine);
  }
  return coords;
}

PointCloud sample_cloud(Dimension d, std::size_t n, std::uint64_t seed, std::uint64_t replicate) {
  PointCloud cloud{d, {}, seed, replicate, CloudKind::binomial, static_cast<double>(n)};
  cloud.coords = sample_gaussian_points(d, {seed, replicate, StreamRole::points}, 0, n);
  return cloud;
}

std::size_t MonotonePoissonFamily::count(double n) const {
  return static_cast<std::size_t>(
      std::upper_bound(arrival_times.begin(), arrival_times.end(), n) - arrival_times.begin());
}

MonotonePoissonFamily sample_arrivals(double horizon, std::uint64_t seed, std::uint64_t replicate) {
  if (!(horizon >= 0.0) || std::isinf(horizon)) {
    throw DomainError("arrival horizon must be finite and >= 0");
  }
  const StreamKey stream{seed, replicate, StreamRole::arrivals};
  MonotonePoissonFamily family;
  family.arrival_times.reserve(static_cast<std::size_t>(horizon + 6.0 * std::sqrt(horizon) + 16.0));
  double t = 0.0;
  for (std::uint64_t i = 0;; ++i) {
    PhiloxEngine engine(stream, i);
    std::exponential_distribution<double> gap(1.0);
    t += gap(engine);
    if (t > horizon) break;
    family.arrival_times.push_back(t);
  }
  return family;
}

PointCloud PoissonizedFamily::cloud(std::size_t grid_index) const {
  const std::size_t count = counts.at(grid_index);
  PointCloud out{base.d, {}, base.seed, base.replicate, CloudKind::poisson, n_grid.at(grid_index)};
  const auto view = base.view().prefix(count);
  out.coords.assign(view.coords().begin(), view.coords().end());
  return out;
}

PoissonizedFamily poissonize(Dimension d, const std::vector<double>& n_grid, std::uint64_t seed,
                             std::uint64_t replicate) {
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (!(n_grid[i] >= 0.0) || (i > 0 && !(n_grid[i] > n_grid[i - 1]))) {
      throw DomainError("poissonize requires a nonnegative, increasing n grid");
    }
  }
  PoissonizedFamily family;
  family.n_grid = n_grid;
  const double horizon = n_grid.empty() ? 0.0 : n_grid.back();
  const auto arrivals = sample_arrivals(horizon, seed, replicate);
  for (double n : n_grid) family.counts.push_back(arrivals.count(n));
  const std::size_t total = family.counts.empty() ? 0 : family.counts.back();
  family.base = PointCloud{d, {}, seed, replicate, CloudKind::poisson, horizon};
  family.base.coords = sample_gaussian_points(d, {seed, replicate, StreamRole::points}, 0, total);
  return family;
}

PointsView CoupledTriple::increment() const {
  const auto dim = static_cast<std::size_t>(d.value());
  return PointsView(d, std::span<const double>(base_points).subspan(n_minus * dim, extra * dim));
}

std::pair<std::size_t, std::size_t> sample_coupling_counts(std::size_t n, std::uint64_t seed,
                                                           std::uint64_t replicate) {
  if (n < 2) throw DomainError("coupled triple requires n >= 2");
  const double nd = static_cast<double>(n);
  const double n34 = std::pow(nd, 0.75);
  PhiloxEngine minus_engine({seed, replicate, StreamRole::count_minus}, n);
  PhiloxEngine extra_engine({seed, replicate, StreamRole::count_extra}, n);
  std::poisson_distribution<long long> minus(nd - n34);
  std::poisson_distribution<long long> extra(2.0 * n34);
  return {static_cast<std::size_t>(minus(minus_engine)),
          static_cast<std::size_t>(extra(extra_engine))};
}

CoupledTriple sample_coupled(Dimension d, std::size_t n, std::uint64_t seed, std::uint64_t replicate) {
  CoupledTriple triple;
  triple.d = d;
  triple.n = n;
  std::tie(triple.n_minus, triple.extra) = sample_coupling_counts(n, seed, replicate);
  triple.h_n = triple.n_minus <= n && n <= triple.n_minus + triple.extra;
  const std::size_t total = std::max(n, triple.n_minus + triple.extra);
  triple.base_points = sample_gaussian_points(d, {seed, replicate, StreamRole::points}, 0, total);
  return triple;
}

namespace {

double squared_norm_from(std::span<const double> center, std::span<const double> x) {
  if (center.size() != x.size()) {
    throw DomainError("region center has dimension " + std::to_string(center.size()) +
                      ", point has " + std::to_string(x.size()));
  }
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double diff = x[k] - center[k];
    s += diff * diff;
  }
  return s;
}

}  // namespace

bool region_contains(const Region& region, std::span<const double> x) {
  return std::visit(
      [&](const auto& r) -> bool {
        using T = std::decay_t<decltype(r)>;
        const double s = squared_norm_from(r.center, x);
        if constexpr (std::is_same_v<T, Ball>) {
          return s < r.radius * r.radius;
        } else if constexpr (std::is_same_v<T, Annulus>) {
          return s >= r.inner * r.inner && s < r.outer * r.outer;
        } else {
          return s >= r.radius * r.radius;
        }
      },
      region);
}

std::size_t count_in_region(const PointsView& points, const Region& region) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (region_contains(region, points.point(i))) ++count;
  }
  return count;
}

void write_cloud(std::ostream& os, const PointCloud& cloud) {
  os << "# d=" << cloud.d.value() << " n=" << cloud.size() << " seed=" << cloud.seed
     << " kind=" << to_string(cloud.kind) << '\n';
  const auto view = cloud.view();
  std::string line;
  for (std::size_t i = 0; i < view.size(); ++i) {
    line.clear();
    const auto p = view.point(i);
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (k > 0) line += ' ';
      line += format_real(p[k]);
    }
    line += '\n';
    os << line;
  }
}

PointCloud read_cloud(std::istream& is) {
  std::string header;
  if (!std::getline(is, header) || header.rfind("# ", 0) != 0) {
    throw DomainError("point dump must start with '# d=<d> n=<n> seed=<seed> kind=<kind>'");
  }
  int d = 0;
  long long n = -1;
  std::uint64_t seed = 0;
  std::string kind = "binomial";
  std::istringstream hs(header.substr(2));
  std::string token;
  while (hs >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw DomainError("bad header token '" + token + "'");
    const auto key = token.substr(0, eq);
    const auto value = token.substr(eq + 1);
    if (key == "d") d = std::stoi(value);
    else if (key == "n") n = std::stoll(value);
    else if (key == "seed") seed = std::stoull(value);
    else if (key == "kind") kind = value;
    else throw DomainError("unknown header key '" + key + "'");
  }
  if (n < 0) throw DomainError("point dump header lacks n");
  PointCloud cloud{Dimension(d), {}, seed, 0, parse_cloud_kind(kind), static_cast<double>(n)};
  cloud.coords.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(d));
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string field;
    int k = 0;
    while (ls >> field) {
      double v = 0.0;
      const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
      if (res.ec != std::errc() || res.ptr != field.data() + field.size() || !std::isfinite(v)) {
        throw DomainError("line " + std::to_string(line_no) + ": bad coordinate '" + field + "'");
      }
      cloud.coords.push_back(v);
      ++k;
    }
    if (k != d) {
      throw DomainError("line " + std::to_string(line_no) + ": expected " + std::to_string(d) +
                        " coordinates, found " + std::to_string(k));
    }
  }
  if (cloud.size() != static_cast<std::size_t>(n)) {
    throw DomainError("header says n=" + std::to_string(n) + " but " +
                      std::to_string(cloud.size()) + " points were read");
  }
  if (cloud.kind == CloudKind::poisson) cloud.mean = 0.0;  // not recorded in the dump
  return cloud;
}

}  // namespace lnnd
