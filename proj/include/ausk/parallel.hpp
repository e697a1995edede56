#pragma once

#include <cstddef>
#include <exception>
#include <utility>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ausk {

enum class ExecMode { Serial, Parallel };

// Runs fn(i) for i in [0, n) and concatenates the returned vectors in index
// order, so the parallel result is byte-identical to the serial one. The
// serial path is the reference implementation used by the consistency tests.
template <typename T, typename Fn>
std::vector<T> indexed_collect(size_t n, ExecMode mode, Fn&& fn) {
  std::vector<std::vector<T>> buckets(n);
  if (mode == ExecMode::Serial) {
    for (size_t i = 0; i < n; ++i) buckets[i] = fn(i);
  } else {
#ifdef _OPENMP
    // exceptions cannot leave a parallel region; carry the first one out
    std::exception_ptr first_error = nullptr;
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
      try {
        buckets[static_cast<size_t>(i)] = fn(static_cast<size_t>(i));
      } catch (...) {
#pragma omp critical(ausk_collect_error)
        if (!first_error) first_error = std::current_exception();
      }
    }
    if (first_error) std::rethrow_exception(first_error);
#else
    for (size_t i = 0; i < n; ++i) buckets[i] = fn(i);
#endif
  }
  std::vector<T> out;
  size_t total = 0;
  for (const auto& b : buckets) total += b.size();
  out.reserve(total);
  for (auto& b : buckets)
    for (auto& x : b) out.push_back(std::move(x));
  return out;
}

}  // namespace ausk
