#pragma once

#include <cstddef>
#include <exception>

namespace lnnd::detail {

/// Runs body(i) for i in [0, count) across OpenMP threads. The first
/// exception thrown by any iteration is rethrown after the loop.
template <class Body>
void parallel_for_each(std::size_t count, Body&& body) {
  std::exception_ptr error;
  const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 1) if (count > 1)
  for (long long i = 0; i < n; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(lnnd_parallel_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace lnnd::detail
