#pragma once

#include <cstdint>

namespace hexcnn {

/// Process-wide multiply-accumulate counter. Every convolution kernel
/// (hexagonal direct, GEMM, and the ZeroOut reference) adds the number of
/// multiplies it actually executed.
std::uint64_t mac_count() noexcept;
void add_macs(std::uint64_t n) noexcept;
void reset_mac_count() noexcept;

/// MACs executed between construction and elapsed().
class MacScope {
 public:
  MacScope() noexcept : start_(mac_count()) {}
  std::uint64_t elapsed() const noexcept { return mac_count() - start_; }

 private:
  std::uint64_t start_;
};

}  // namespace hexcnn
