#include "hexcnn/counters.hpp"

#include <atomic>

namespace hexcnn {
namespace {
std::atomic<std::uint64_t> g_macs{0};
}  // namespace

std::uint64_t mac_count() noexcept { return g_macs.load(std::memory_order_relaxed); }
void add_macs(std::uint64_t n) noexcept { g_macs.fetch_add(n, std::memory_order_relaxed); }
void reset_mac_count() noexcept { g_macs.store(0, std::memory_order_relaxed); }

}  // namespace hexcnn
