#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace bsq {

/// Worker count: BSQ_THREADS if set and positive, else the hardware concurrency.
inline int thread_count() {
  if (const char* env = std::getenv("BSQ_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [0, n). Calls must be independent of each other.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(thread_count()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t k = 0; k < workers; ++k) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
}

/// Deterministic map-reduce over [0, n).
///
/// The range is cut into fixed-size chunks that do not depend on the thread
/// count; chunk results are combined left to right, so floating-point results
/// are bit-identical for any BSQ_THREADS.
template <class T, class ChunkFn, class Combine>
T chunked_reduce(std::size_t n, std::size_t chunk, T init, ChunkFn&& map_chunk, Combine&& combine) {
  if (n == 0) return init;
  chunk = std::max<std::size_t>(chunk, 1);
  const std::size_t chunks = (n + chunk - 1) / chunk;
  std::vector<std::optional<T>> partial(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t begin = c * chunk;
    partial[c].emplace(map_chunk(begin, std::min(n, begin + chunk)));
  });
  T acc = std::move(init);
  for (auto& p : partial) acc = combine(std::move(acc), std::move(*p));
  return acc;
}

}  // namespace bsq
