#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace graspmap {

// Static block partition over [0, count). Each index is handled exactly once
// and results must be written to per-index slots, so the output is identical
// for any thread count.
inline void parallel_for(long count, int threads,
                         const std::function<void(long, long)>& body) {
  if (threads <= 0) threads = 1;
  threads = static_cast<int>(
      std::min<long>(threads, std::max<long>(count, 1)));
  if (threads == 1 || count < 2) {
    body(0, count);
    return;
  }
  std::vector<std::thread> pool;
  const long chunk = (count + threads - 1) / threads;
  for (int i = 0; i < threads; ++i) {
    const long lo = i * chunk;
    const long hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back(body, lo, hi);
  }
  for (auto& t : pool) t.join();
}

}  // namespace graspmap
