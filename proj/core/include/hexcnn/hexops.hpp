#pragma once

// Forward kernels on hexagonal storage: valid and full convolution with
// hexagon-shaped filters, and max/average pooling over hexagonal windows.
//
// Convolution is a top-left anchored cross-correlation. Output cell (u, v)
// anchors its window at input cell (s*u, s*v) and reads input cell
// (s*u + d.u, s*v + d.v) for every filter cell d.

#include <cstdint>
#include <span>
#include <vector>

#include "hexcnn/hexgrid.hpp"

namespace hexcnn {

enum class ConvMode { valid, full };

/// How a stride that does not tile the input exactly is handled.
enum class StrideRounding { exact, floor };

struct ConvGeometry {
  int input_side = 1;
  int filter_side = 1;
  int stride = 1;
  ConvMode mode = ConvMode::valid;
  StrideRounding rounding = StrideRounding::exact;
  int output_side = 1;

  /// Throws GeometryError if the window does not fit or (exact rounding)
  /// the stride does not divide L_I - L_k.
  static ConvGeometry valid(int input_side, int filter_side, int stride,
                            StrideRounding rounding = StrideRounding::exact);
  static ConvGeometry full(int input_side, int filter_side);
};

/// F hexagonal filters of side L_k over C input channels, plus one bias per
/// filter. Weights are filter-major, then channel-major, then column-major.
template <class T>
class BasicFilterBank {
 public:
  BasicFilterBank(int filters, int in_channels, int side);
  BasicFilterBank(int filters, int in_channels, int side, std::vector<T> weights,
                  std::vector<T> bias = {});

  int filters() const noexcept { return filters_; }
  int in_channels() const noexcept { return in_channels_; }
  int side() const noexcept { return shape_.side(); }
  const HexShape& shape() const noexcept { return shape_; }
  /// Cells per filter channel (E_k).
  std::size_t cells() const noexcept { return shape_.cell_count(); }

  std::span<T> weights() noexcept { return weights_; }
  std::span<const T> weights() const noexcept { return weights_; }
  std::span<T> bias() noexcept { return bias_; }
  std::span<const T> bias() const noexcept { return bias_; }

  std::span<T> filter(int f, int c) noexcept {
    return std::span<T>(weights_).subspan(offset(f, c), cells());
  }
  std::span<const T> filter(int f, int c) const noexcept {
    return std::span<const T>(weights_).subspan(offset(f, c), cells());
  }

  friend bool operator==(const BasicFilterBank&, const BasicFilterBank&) = default;

 private:
  std::size_t offset(int f, int c) const noexcept {
    return (static_cast<std::size_t>(f) * static_cast<std::size_t>(in_channels_) +
            static_cast<std::size_t>(c)) *
           cells();
  }

  int filters_;
  int in_channels_;
  HexShape shape_;
  std::vector<T> weights_;
  std::vector<T> bias_;
};

using FilterBank = BasicFilterBank<double>;
using FilterBankF = BasicFilterBank<float>;

/// Winning input cell (storage offset within its channel) of every max-pool
/// window, indexed channel-major then by output storage offset.
struct ArgmaxMap {
  int input_side = 1;
  int output_side = 1;
  int window_side = 1;
  int stride = 1;
  int channels = 1;
  std::vector<std::uint32_t> winners;

  std::uint32_t winner(int c, std::size_t out_offset) const {
    return winners[static_cast<std::size_t>(c) * cell_count(output_side) + out_offset];
  }
};

template <class T>
struct MaxPoolResult {
  BasicHexTensor<T> output;
  ArgmaxMap argmax;
};

template <class T>
BasicHexTensor<T> conv_valid(const BasicHexTensor<T>& input, const BasicFilterBank<T>& filters,
                             int stride, StrideRounding rounding = StrideRounding::exact);

/// Full convolution: valid convolution over the input padded by 2(L_k-1) rings.
template <class T>
BasicHexTensor<T> conv_full(const BasicHexTensor<T>& input, const BasicFilterBank<T>& filters);

/// Ties resolve to the smallest storage offset.
template <class T>
MaxPoolResult<T> maxpool(const BasicHexTensor<T>& input, int window_side, int stride,
                         StrideRounding rounding = StrideRounding::exact);

template <class T>
BasicHexTensor<T> avgpool(const BasicHexTensor<T>& input, int window_side, int stride,
                          StrideRounding rounding = StrideRounding::exact);

/// Filter f as a C-channel hexagonal tensor.
template <class T>
BasicHexTensor<T> filter_tensor(const BasicFilterBank<T>& bank, int f);

/// Swaps the filter and channel axes and point-reflects every filter: the
/// bank whose full convolution computes the input gradient.
template <class T>
BasicFilterBank<T> transpose_reflect(const BasicFilterBank<T>& bank);

}  // namespace hexcnn
