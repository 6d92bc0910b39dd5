// Minimal deterministic work partitioning on std::thread.
#pragma once

#include <algorithm>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace blockspin {

// Maps the user-facing thread request to a concrete count: 0 means "use all
// hardware threads", anything else is taken literally.
inline int resolve_thread_count(int requested) {
  if (requested < 0) throw std::invalid_argument("thread count must be >= 0");
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs run_chunk(lo, hi) over a partition of [begin, end) into contiguous
// chunks, one per worker.  Chunks must write to disjoint state; outputs
// indexed by the loop variable keep results independent of the partition.
inline void parallel_chunks(int begin, int end, int threads,
                            const std::function<void(int, int)>& run_chunk) {
  const int count = end - begin;
  if (count <= 0) return;
  const int workers = std::min(resolve_thread_count(threads), count);
  if (workers <= 1) {
    run_chunk(begin, end);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const int base = count / workers;
  const int extra = count % workers;
  int lo = begin;
  for (int w = 0; w < workers; ++w) {
    const int hi = lo + base + (w < extra ? 1 : 0);
    pool.emplace_back([&run_chunk, &errors, w, lo, hi] {
      try {
        run_chunk(lo, hi);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
    lo = hi;
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace blockspin
