#pragma once

// Replicate-level parallelism. Each replicate owns its random stream, so the
// result vector depends only on the replicate index, never on scheduling.

#include <cstdint>
#include <exception>
#include <vector>

#include <omp.h>

namespace kaclab {

/// Thread count from KACLAB_THREADS, else the OpenMP default.
int default_threads();

/// Normalizes a requested thread count: values <= 0 mean default_threads().
int resolve_threads(int requested);

/// out[r] = fn(r) for r in [0, count), in index order, one thread.
template <class Fn>
auto serial_map(std::int64_t count, Fn&& fn) -> std::vector<decltype(fn(std::int64_t{}))> {
  std::vector<decltype(fn(std::int64_t{}))> out;
  out.reserve(static_cast<std::size_t>(count));
  for (std::int64_t r = 0; r < count; ++r) out.push_back(fn(r));
  return out;
}

/// Same contract as serial_map, with replicates distributed dynamically over
/// an OpenMP team. The first exception (lowest replicate index) is rethrown
/// after the loop finishes.
template <class Fn>
auto parallel_map(std::int64_t count, Fn&& fn, int threads = 0)
    -> std::vector<decltype(fn(std::int64_t{}))> {
  using T = decltype(fn(std::int64_t{}));
  std::vector<T> out(static_cast<std::size_t>(count));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  const int team = resolve_threads(threads);
#pragma omp parallel for schedule(dynamic) num_threads(team)
  for (std::int64_t r = 0; r < count; ++r) {
    try {
      out[static_cast<std::size_t>(r)] = fn(r);
    } catch (...) {
      errors[static_cast<std::size_t>(r)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace kaclab
