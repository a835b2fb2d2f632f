// Brute force vs k-d tree, serial vs OpenMP.
//   bench_nng [max_n] [threads]

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "lnnd/nng.hpp"
#include "lnnd/point_process.hpp"

namespace {

template <class F>
double seconds(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  const double max_n = argc > 1 ? std::atof(argv[1]) : 1e6;
  const int threads = argc > 2 ? std::atoi(argv[2]) : omp_get_max_threads();
  std::printf("%-4s %-10s %12s %12s %12s %12s %6s\n", "d", "n", "sample_s", "brute_s", "fast_1t_s",
              "fast_mt_s", "equal");
  for (int d : {2, 3, 5}) {
    for (double n = 1e3; n <= max_n; n *= 10) {
      const auto count = static_cast<std::size_t>(n);
      lnnd::PointCloud cloud;
      const double ts = seconds([&] { cloud = lnnd::sample_cloud(lnnd::Dimension(d), count, 1); });
      lnnd::NngResult brute, fast1, fastm;
      double tb = -1;
      if (n <= 2e4) tb = seconds([&] { brute = lnnd::build_nng_brute(cloud.view()); });
      omp_set_num_threads(1);
      const double t1 = seconds([&] { fast1 = lnnd::build_nng_fast(cloud.view()); });
      omp_set_num_threads(threads);
      const double tm = seconds([&] { fastm = lnnd::build_nng_fast(cloud.view()); });
      const bool equal = fast1 == fastm && (tb < 0 || brute == fast1);
      char brute_cell[32] = "-";
      if (tb >= 0) std::snprintf(brute_cell, sizeof brute_cell, "%.4f", tb);
      std::printf("%-4d %-10.0f %12.4f %12s %12.4f %12.4f %6s\n", d, n, ts, brute_cell, t1, tm,
                  equal ? "yes" : "NO");
    }
  }
}
