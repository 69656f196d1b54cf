#include "hexcnn/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace hexcnn {
namespace {

std::atomic<int>& thread_cap() {
  static std::atomic<int> cap{default_threads()};
  return cap;
}

}  // namespace

int default_threads() noexcept {
  if (const char* env = std::getenv("HEXCNN_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n >= 1) return static_cast<int>(n);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

int max_threads() noexcept { return thread_cap().load(std::memory_order_relaxed); }

void set_max_threads(int threads) noexcept {
  thread_cap().store(threads < 1 ? 1 : threads, std::memory_order_relaxed);
}

}  // namespace hexcnn
