#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <string>

#include <tbb/blocked_range.h>
#include <tbb/info.h>
#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

namespace sdfgrow {

/// Worker count from SDFGROW_WORKERS, else 0 (= let TBB decide).
inline int default_workers() {
  if (const char* env = std::getenv("SDFGROW_WORKERS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (...) {
    }
  }
  return 0;
}

/// Runs f(i) for i in [0, n) on `workers` threads (0 = automatic, 1 = inline).
/// Each index must write only its own output slot.
template <class F>
void parallel_for(std::size_t n, int workers, F&& f) {
  if (workers == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  const int cap = tbb::info::default_concurrency();
  tbb::task_arena arena(workers > 0 ? std::min(workers, cap) : tbb::task_arena::automatic);
  arena.execute([&] {
    tbb::parallel_for(tbb::blocked_range<std::size_t>(0, n), [&](const tbb::blocked_range<std::size_t>& r) {
      for (std::size_t i = r.begin(); i != r.end(); ++i) f(i);
    });
  });
}

}  // namespace sdfgrow
