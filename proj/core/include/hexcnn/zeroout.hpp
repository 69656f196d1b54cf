#pragma once

// ZeroOut hexagon imitation: hexagonal data embedded in a (2L-1)x(2L-1)
// parallelogram and convolved with (2L_k-1)x(2L_k-1) rectangular filters
// whose two corner triangles are fixed to zero.
//
// Everything here is deliberately naive nested loops. It is the trusted
// oracle for the hexagonal kernels and the baseline they are measured against.

#include <cstdint>
#include <vector>

#include "hexcnn/hexgrad.hpp"
#include "hexcnn/hexops.hpp"

namespace hexcnn {

/// Dense channels x height x width tensor, row-major within a channel.
template <class T>
struct BasicRectTensor {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<T> data;
  /// height*width flags, 1 where the cell belongs to the embedded hexagon.
  /// Empty when the tensor carries no mask.
  std::vector<std::uint8_t> mask;

  BasicRectTensor() = default;
  BasicRectTensor(int h, int w, int c);

  T& at(int c, int i, int j) { return data[index(c, i, j)]; }
  const T& at(int c, int i, int j) const { return data[index(c, i, j)]; }
  std::size_t index(int c, int i, int j) const noexcept {
    return (static_cast<std::size_t>(c) * static_cast<std::size_t>(height) +
            static_cast<std::size_t>(i)) *
               static_cast<std::size_t>(width) +
           static_cast<std::size_t>(j);
  }
};

using RectTensor = BasicRectTensor<double>;

/// F x C square filters of size (2L_k-1); corners outside the hexagon are zero.
template <class T>
struct BasicZeroOutFilterBank {
  int filters = 0;
  int in_channels = 0;
  int hex_side = 1;
  std::vector<T> weights;  // filter-major, channel-major, row-major
  std::vector<T> bias;

  int size() const noexcept { return 2 * hex_side - 1; }
  T& at(int f, int c, int i, int j) { return weights[index(f, c, i, j)]; }
  const T& at(int f, int c, int i, int j) const { return weights[index(f, c, i, j)]; }
  std::size_t index(int f, int c, int i, int j) const noexcept {
    const auto n = static_cast<std::size_t>(size());
    return ((static_cast<std::size_t>(f) * static_cast<std::size_t>(in_channels) +
             static_cast<std::size_t>(c)) *
                n +
            static_cast<std::size_t>(i)) *
               n +
           static_cast<std::size_t>(j);
  }
};

using ZeroOutFilterBank = BasicZeroOutFilterBank<double>;

/// Hex cell (u, v) goes to rect (u, v); the two corner triangles are zero and masked out.
template <class T>
BasicRectTensor<T> embed_parallelogram(const BasicHexTensor<T>& t);

/// Reads hex(L_O) cell (u, v) from rect (u, v).
template <class T>
BasicHexTensor<T> extract_hex(const BasicRectTensor<T>& r, int output_side);

template <class T>
BasicZeroOutFilterBank<T> zeroout_filter(const BasicFilterBank<T>& bank);

/// Inverse of zeroout_filter; the zeroed corners are dropped.
template <class T>
BasicFilterBank<T> hex_filter(const BasicZeroOutFilterBank<T>& bank);

/// Plain rectangular cross-correlation. Output (i, j) reads input
/// (s*i + a, s*j + b). Full mode zero-pads 2L_k-2 cells on every side and
/// requires s = 1. Every multiply, including those against zeroed corners,
/// is counted.
template <class T>
BasicRectTensor<T> rect_conv_reference(const BasicRectTensor<T>& input,
                                       const BasicZeroOutFilterBank<T>& filters, int stride,
                                       ConvMode mode = ConvMode::valid);

/// Output side of the rect pipeline for a valid hexagonal geometry.
int rect_output_size(int input_side, int filter_side, int stride);

/// The complete ZeroOut pipeline: embed, rectangular conv, extract.
template <class T>
BasicHexTensor<T> zeroout_conv(const BasicHexTensor<T>& input, const BasicFilterBank<T>& filters,
                               int stride, ConvMode mode = ConvMode::valid,
                               StrideRounding rounding = StrideRounding::exact);

// Pieces the ZeroOut-embedded training path needs. They mirror the hexagonal
// layer kernels but run over the full rectangle with masked windows.

template <class T>
struct RectPoolResult {
  BasicRectTensor<T> output;
  std::vector<std::uint32_t> winners;  // flat rect index within the channel
};

/// Max pool with a hexagon-shaped window mask; outputs cover the whole rectangle.
template <class T>
RectPoolResult<T> rect_maxpool_reference(const BasicRectTensor<T>& input, int window_side,
                                         int stride, int output_size);

template <class T>
BasicRectTensor<T> rect_avgpool_reference(const BasicRectTensor<T>& input, int window_side,
                                          int stride, int output_size);

/// Input gradient as a rectangular full convolution of the upsampled error
/// with the 180-degree rotated, channel-transposed rectangular filters.
template <class T>
BasicRectTensor<T> rect_conv_backward_input(const BasicRectTensor<T>& delta,
                                            const BasicZeroOutFilterBank<T>& filters, int stride,
                                            int input_size);

/// Rectangular filter gradient; corner entries are computed then discarded
/// by the caller (they stay structurally zero).
template <class T>
BasicZeroOutFilterBank<T> rect_conv_backward_filter(const BasicRectTensor<T>& input,
                                                    const BasicRectTensor<T>& delta,
                                                    int filter_side, int stride);

/// Hexagonal-layer wrappers around the rect kernels above, with hexagonal
/// inputs and outputs. They compute the same quantities as the hexgrad and
/// hexops functions of the same role.
namespace zeroout {

template <class T>
MaxPoolResult<T> maxpool(const BasicHexTensor<T>& input, int window_side, int stride,
                         StrideRounding rounding);
template <class T>
BasicHexTensor<T> avgpool(const BasicHexTensor<T>& input, int window_side, int stride,
                          StrideRounding rounding);
template <class T>
BasicHexTensor<T> conv_backward_input(const BasicHexTensor<T>& delta,
                                      const BasicFilterBank<T>& filters, int stride,
                                      int input_side);
template <class T>
FilterGradients<T> conv_backward_filter(const BasicHexTensor<T>& input,
                                        const BasicHexTensor<T>& delta, int filter_side,
                                        int stride);
template <class T>
BasicHexTensor<T> maxpool_backward(const BasicHexTensor<T>& delta, const ArgmaxMap& map,
                                   int input_side);
template <class T>
BasicHexTensor<T> avgpool_backward(const BasicHexTensor<T>& delta, int window_side, int stride,
                                   int input_side);

}  // namespace zeroout

}  // namespace hexcnn
