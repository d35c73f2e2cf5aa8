#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace blockheat::detail {

inline unsigned resolve_threads(unsigned requested) noexcept {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(begin, end) over disjoint contiguous chunks of [0, n). Each index
/// is visited by exactly one chunk, so results do not depend on the split.
template <typename Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body) {
  constexpr std::size_t kMinChunk = 256;
  const std::size_t max_workers = std::max<std::size_t>(1, n / kMinChunk);
  const std::size_t workers = std::min<std::size_t>(resolve_threads(threads), max_workers);
  if (workers <= 1) {
    body(std::size_t{0}, n);
    return;
  }
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&body, begin, end] { body(begin, end); });
  }
  body(std::size_t{0}, std::min(n, chunk));
}

}  // namespace blockheat::detail
