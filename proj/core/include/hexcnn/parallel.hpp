#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace hexcnn {

/// Thread cap for kernel parallelism. Starts at $HEXCNN_THREADS or, if unset,
/// the hardware concurrency.
int max_threads() noexcept;
void set_max_threads(int threads) noexcept;
int default_threads() noexcept;

/// Splits [0, n) into contiguous chunks and runs body(begin, end) on each,
/// using at most max_threads() threads. Work below `grain` items per thread
/// runs inline. Every index is visited exactly once, so bodies that write
/// disjoint outputs give identical results for any thread count.
template <class Body>
void parallel_for(std::size_t n, std::size_t grain, Body&& body) {
  if (n == 0) return;
  const std::size_t by_grain = grain == 0 ? n : std::max<std::size_t>(1, n / grain);
  const std::size_t workers =
      std::min<std::size_t>({static_cast<std::size_t>(max_threads()), by_grain, n});
  if (workers <= 1) {
    body(std::size_t{0}, n);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 1; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&body, begin, end] { body(begin, end); });
  }
  body(std::size_t{0}, std::min(n, chunk));
}

/// Restores the previous thread cap on scope exit.
class ScopedThreads {
 public:
  explicit ScopedThreads(int threads) : saved_(max_threads()) { set_max_threads(threads); }
  ~ScopedThreads() { set_max_threads(saved_); }
  ScopedThreads(const ScopedThreads&) = delete;
  ScopedThreads& operator=(const ScopedThreads&) = delete;

 private:
  int saved_;
};

}  // namespace hexcnn
