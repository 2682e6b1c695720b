#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace sheetgame {

/// Worker count used by parallel_for when none is given. Initialised from
/// SHEETGAME_WORKERS, falling back to 1.
int default_workers();
void set_default_workers(int workers);

/// Runs body(k) for k in [0, n) over contiguous chunks. Each index is
/// processed exactly once by exactly one worker, so outputs written to
/// slot k are independent of the worker count.
template <class Body>
void parallel_for(std::size_t n, Body&& body, int workers = 0) {
  if (workers <= 0) workers = default_workers();
  const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
  if (w <= 1) {
    for (std::size_t k = 0; k < n; ++k) body(k);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(w);
  const std::size_t chunk = (n + w - 1) / w;
  for (std::size_t t = 0; t < w; ++t) {
    const std::size_t lo = t * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (std::size_t k = lo; k < hi; ++k) body(k);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace sheetgame
