#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace diracsea {

inline unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

// Runs fn(begin, end) over a fixed block partition of [0, total). Results must
// not depend on the partition; callers keep determinism by writing to disjoint
// per-item slots and reducing serially afterwards.
inline void parallel_for_blocks(std::size_t total, unsigned threads,
                                const std::function<void(std::size_t, std::size_t)>& fn) {
  threads = resolve_threads(threads);
  if (threads <= 1 || total <= 1) {
    fn(0, total);
    return;
  }
  const std::size_t nblk = std::min<std::size_t>(threads, total);
  std::vector<std::thread> pool;
  pool.reserve(nblk);
  const std::size_t chunk = (total + nblk - 1) / nblk;
  for (std::size_t b = 0; b < nblk; ++b) {
    const std::size_t lo = b * chunk;
    const std::size_t hi = std::min(total, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back(fn, lo, hi);
  }
  for (auto& th : pool) th.join();
}

}  // namespace diracsea
