#pragma once

#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tfim {

// Execution policy for the data-parallel kernels. Every kernel produces
// bit-identical results under either policy and under any thread count:
// parallel loops are either pure gathers (each iteration owns its output
// slot) or reductions over a fixed chunk grid merged in chunk order.
enum class Exec { serial, parallel };

template <class Body>
void parallel_for(Exec exec, std::ptrdiff_t n, Body&& body) {
  if (exec == Exec::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::ptrdiff_t i = 0; i < n; ++i) body(static_cast<std::size_t>(i));
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) body(static_cast<std::size_t>(i));
  }
}

// Reduce over [0, n) with a fixed chunk grid. chunk_fn(begin, end) evaluates
// one chunk serially; partial results are folded in chunk-index order, so the
// result does not depend on the thread count.
template <class T, class ChunkFn, class MergeFn>
T chunked_reduce(Exec exec, std::size_t n, std::size_t chunk_size, T init,
                 ChunkFn&& chunk_fn, MergeFn&& merge) {
  if (n == 0) return init;
  if (chunk_size == 0) chunk_size = 1;
  const std::size_t n_chunks = (n + chunk_size - 1) / chunk_size;
  std::vector<T> partial(n_chunks);
  parallel_for(exec, static_cast<std::ptrdiff_t>(n_chunks), [&](std::size_t c) {
    const std::size_t begin = c * chunk_size;
    const std::size_t end = begin + chunk_size < n ? begin + chunk_size : n;
    partial[c] = chunk_fn(begin, end);
  });
  T acc = init;
  for (std::size_t c = 0; c < n_chunks; ++c) merge(acc, partial[c]);
  return acc;
}

// Deterministic parallel sum of term(i) over [0, n).
template <class TermFn>
double chunked_sum(Exec exec, std::size_t n, TermFn&& term,
                   std::size_t chunk_size = 4096) {
  return chunked_reduce<double>(
      exec, n, chunk_size, 0.0,
      [&](std::size_t begin, std::size_t end) {
        double s = 0.0;
        for (std::size_t i = begin; i < end; ++i) s += term(i);
        return s;
      },
      [](double& acc, double v) { acc += v; });
}

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace tfim
