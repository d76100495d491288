#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace layerpot {

// Worker count: LAYERPOT_THREADS caps it, 0/unset means hardware concurrency.
inline int worker_count() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  if (const char* env = std::getenv("LAYERPOT_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0 && cap < hw) hw = cap;
  }
  return hw;
}

// Runs body(i) for i in [0, count).  Each index writes only its own output
// slot, so the result is identical regardless of the thread count.
inline void parallel_for(int count, const std::function<void(int)>& body) {
  const int workers = std::min(worker_count(), count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int i = w; i < count; i += workers) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace layerpot
