#include "hexcnn/zeroout.hpp"

#include <algorithm>
#include <string>

#include "hexcnn/counters.hpp"

namespace hexcnn {
namespace {

bool in_hex_window(int a, int b, int side) { return a - b < side && b - a < side; }

// Hex (u, v) -> rect flat index for a rect of the given width.
std::uint32_t rect_flat(int u, int v, int width) {
  return static_cast<std::uint32_t>(u * width + v);
}

}  // namespace

template <class T>
BasicRectTensor<T>::BasicRectTensor(int h, int w, int c) : height(h), width(w), channels(c) {
  if (h < 0 || w < 0 || c < 1) throw ShapeError("invalid rect tensor dimensions");
  data.assign(static_cast<std::size_t>(h) * static_cast<std::size_t>(w) *
                  static_cast<std::size_t>(c),
              T{0});
}

template <class T>
BasicRectTensor<T> embed_parallelogram(const BasicHexTensor<T>& t) {
  const int n = t.shape().extent();
  BasicRectTensor<T> r(n, n, t.channels());
  r.mask.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0);
  t.shape().for_each_cell([&](std::size_t, AxialIndex idx) {
    r.mask[static_cast<std::size_t>(idx.u) * static_cast<std::size_t>(n) +
           static_cast<std::size_t>(idx.v)] = 1;
  });
  for (int c = 0; c < t.channels(); ++c) {
    auto in = t.channel(c);
    t.shape().for_each_cell(
        [&](std::size_t off, AxialIndex idx) { r.at(c, idx.u, idx.v) = in[off]; });
  }
  return r;
}

template <class T>
BasicHexTensor<T> extract_hex(const BasicRectTensor<T>& r, int output_side) {
  const HexShape shape(output_side);
  if (shape.extent() > r.height || shape.extent() > r.width) {
    throw ShapeError("side-" + std::to_string(output_side) + " hexagon does not fit in a " +
                     std::to_string(r.height) + "x" + std::to_string(r.width) + " rectangle");
  }
  BasicHexTensor<T> out(shape, r.channels);
  for (int c = 0; c < r.channels; ++c) {
    auto o = out.channel(c);
    shape.for_each_cell([&](std::size_t off, AxialIndex idx) { o[off] = r.at(c, idx.u, idx.v); });
  }
  return out;
}

template <class T>
BasicZeroOutFilterBank<T> zeroout_filter(const BasicFilterBank<T>& bank) {
  BasicZeroOutFilterBank<T> z;
  z.filters = bank.filters();
  z.in_channels = bank.in_channels();
  z.hex_side = bank.side();
  const auto n = static_cast<std::size_t>(z.size());
  z.weights.assign(static_cast<std::size_t>(z.filters) * static_cast<std::size_t>(z.in_channels) *
                       n * n,
                   T{0});
  z.bias.assign(bank.bias().begin(), bank.bias().end());
  for (int f = 0; f < bank.filters(); ++f) {
    for (int c = 0; c < bank.in_channels(); ++c) {
      auto w = bank.filter(f, c);
      bank.shape().for_each_cell(
          [&](std::size_t off, AxialIndex idx) { z.at(f, c, idx.u, idx.v) = w[off]; });
    }
  }
  return z;
}

template <class T>
BasicFilterBank<T> hex_filter(const BasicZeroOutFilterBank<T>& z) {
  BasicFilterBank<T> bank(z.filters, z.in_channels, z.hex_side);
  for (int f = 0; f < z.filters; ++f) {
    for (int c = 0; c < z.in_channels; ++c) {
      auto w = bank.filter(f, c);
      bank.shape().for_each_cell(
          [&](std::size_t off, AxialIndex idx) { w[off] = z.at(f, c, idx.u, idx.v); });
    }
  }
  if (!z.bias.empty()) std::copy(z.bias.begin(), z.bias.end(), bank.bias().begin());
  return bank;
}

template <class T>
BasicRectTensor<T> rect_conv_reference(const BasicRectTensor<T>& input,
                                       const BasicZeroOutFilterBank<T>& filters, int stride,
                                       ConvMode mode) {
  if (filters.in_channels != input.channels) {
    throw ShapeError("rect filters expect " + std::to_string(filters.in_channels) +
                     " channels, input has " + std::to_string(input.channels));
  }
  if (stride < 1) throw GeometryError("stride must be >= 1");
  const int n = filters.size();
  int pad = 0;
  if (mode == ConvMode::full) {
    if (stride != 1) throw GeometryError("full convolution requires stride 1");
    pad = n - 1;
  }
  const int h = input.height + 2 * pad;
  const int w = input.width + 2 * pad;
  if (n > h || n > w) throw GeometryError("rect filter larger than input");
  const int out_h = (h - n) / stride + 1;
  const int out_w = (w - n) / stride + 1;

  BasicRectTensor<T> out(out_h, out_w, filters.filters);
  std::uint64_t macs = 0;
  for (int f = 0; f < filters.filters; ++f) {
    const T bias = filters.bias.empty() ? T{0} : filters.bias[static_cast<std::size_t>(f)];
    for (int i = 0; i < out_h; ++i) {
      for (int j = 0; j < out_w; ++j) {
        T acc{0};
        for (int c = 0; c < input.channels; ++c) {
          // Filter columns outer, rows inner.
          for (int b = 0; b < n; ++b) {
            for (int a = 0; a < n; ++a) {
              const int y = stride * i + a - pad;
              const int x = stride * j + b - pad;
              const T v = (y >= 0 && y < input.height && x >= 0 && x < input.width)
                              ? input.at(c, y, x)
                              : T{0};
              acc += v * filters.at(f, c, a, b);
              ++macs;
            }
          }
        }
        out.at(f, i, j) = acc + bias;
      }
    }
  }
  add_macs(macs);
  return out;
}

int rect_output_size(int input_side, int filter_side, int stride) {
  return (2 * input_side - 1 - (2 * filter_side - 1)) / stride + 1;
}

template <class T>
BasicHexTensor<T> zeroout_conv(const BasicHexTensor<T>& input, const BasicFilterBank<T>& filters,
                               int stride, ConvMode mode, StrideRounding rounding) {
  if (filters.in_channels() != input.channels()) {
    throw ShapeError("filter bank expects " + std::to_string(filters.in_channels()) +
                     " channels, input has " + std::to_string(input.channels()));
  }
  const ConvGeometry geo = mode == ConvMode::full
                               ? ConvGeometry::full(input.side(), filters.side())
                               : ConvGeometry::valid(input.side(), filters.side(), stride, rounding);
  if (mode == ConvMode::full && stride != 1) throw GeometryError("full convolution requires stride 1");
  const auto rect =
      rect_conv_reference(embed_parallelogram(input), zeroout_filter(filters), stride, mode);
  return extract_hex(rect, geo.output_side);
}

template <class T>
RectPoolResult<T> rect_maxpool_reference(const BasicRectTensor<T>& input, int window_side,
                                         int stride, int output_size) {
  const int n = 2 * window_side - 1;
  if (stride * (output_size - 1) + n > std::min(input.height, input.width)) {
    throw GeometryError("rect pool windows leave the input");
  }
  RectPoolResult<T> res{BasicRectTensor<T>(output_size, output_size, input.channels), {}};
  res.winners.assign(res.output.data.size(), 0);
  for (int c = 0; c < input.channels; ++c) {
    for (int i = 0; i < output_size; ++i) {
      for (int j = 0; j < output_size; ++j) {
        bool first = true;
        T best{0};
        std::uint32_t arg = 0;
        for (int b = 0; b < n; ++b) {
          for (int a = 0; a < n; ++a) {
            if (!in_hex_window(a, b, window_side)) continue;
            const int y = stride * i + a;
            const int x = stride * j + b;
            const T v = input.at(c, y, x);
            if (first || v > best) {
              best = v;
              arg = rect_flat(y, x, input.width);
              first = false;
            }
          }
        }
        res.output.at(c, i, j) = best;
        res.winners[res.output.index(c, i, j)] = arg;
      }
    }
  }
  return res;
}

template <class T>
BasicRectTensor<T> rect_avgpool_reference(const BasicRectTensor<T>& input, int window_side,
                                          int stride, int output_size) {
  const int n = 2 * window_side - 1;
  if (stride * (output_size - 1) + n > std::min(input.height, input.width)) {
    throw GeometryError("rect pool windows leave the input");
  }
  const T count = static_cast<T>(cell_count(window_side));
  BasicRectTensor<T> out(output_size, output_size, input.channels);
  for (int c = 0; c < input.channels; ++c) {
    for (int i = 0; i < output_size; ++i) {
      for (int j = 0; j < output_size; ++j) {
        T sum{0};
        for (int b = 0; b < n; ++b) {
          for (int a = 0; a < n; ++a) {
            if (in_hex_window(a, b, window_side)) sum += input.at(c, stride * i + a, stride * j + b);
          }
        }
        out.at(c, i, j) = sum / count;
      }
    }
  }
  return out;
}

template <class T>
BasicRectTensor<T> rect_conv_backward_input(const BasicRectTensor<T>& delta,
                                            const BasicZeroOutFilterBank<T>& filters, int stride,
                                            int input_size) {
  if (delta.channels != filters.filters) throw ShapeError("error channels must equal filter count");
  const int n = filters.size();
  const int dense = (delta.height - 1) * stride + 1;
  BasicRectTensor<T> up(dense, dense, delta.channels);
  for (int f = 0; f < delta.channels; ++f) {
    for (int i = 0; i < delta.height; ++i) {
      for (int j = 0; j < delta.width; ++j) up.at(f, stride * i, stride * j) = delta.at(f, i, j);
    }
  }
  BasicZeroOutFilterBank<T> rot;
  rot.filters = filters.in_channels;
  rot.in_channels = filters.filters;
  rot.hex_side = filters.hex_side;
  rot.weights.assign(filters.weights.size(), T{0});
  for (int f = 0; f < filters.filters; ++f) {
    for (int c = 0; c < filters.in_channels; ++c) {
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) rot.at(c, f, n - 1 - a, n - 1 - b) = filters.at(f, c, a, b);
      }
    }
  }
  BasicRectTensor<T> full = rect_conv_reference(up, rot, 1, ConvMode::full);
  if (full.height > input_size) throw GeometryError("error signal larger than the forward pass");
  BasicRectTensor<T> out(input_size, input_size, full.channels);
  for (int c = 0; c < full.channels; ++c) {
    for (int i = 0; i < full.height; ++i) {
      for (int j = 0; j < full.width; ++j) out.at(c, i, j) = full.at(c, i, j);
    }
  }
  return out;
}

template <class T>
BasicZeroOutFilterBank<T> rect_conv_backward_filter(const BasicRectTensor<T>& input,
                                                    const BasicRectTensor<T>& delta,
                                                    int filter_side, int stride) {
  BasicZeroOutFilterBank<T> g;
  g.filters = delta.channels;
  g.in_channels = input.channels;
  g.hex_side = filter_side;
  const int n = g.size();
  if (stride * (delta.height - 1) + n > input.height ||
      stride * (delta.width - 1) + n > input.width) {
    throw GeometryError("error signal does not match the forward geometry");
  }
  g.weights.assign(static_cast<std::size_t>(g.filters) * static_cast<std::size_t>(g.in_channels) *
                       static_cast<std::size_t>(n * n),
                   T{0});
  g.bias.assign(static_cast<std::size_t>(g.filters), T{0});
  std::uint64_t macs = 0;
  for (int f = 0; f < g.filters; ++f) {
    for (int c = 0; c < g.in_channels; ++c) {
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
          T acc{0};
          for (int j = 0; j < delta.width; ++j) {
            for (int i = 0; i < delta.height; ++i) {
              acc += delta.at(f, i, j) * input.at(c, stride * i + a, stride * j + b);
              ++macs;
            }
          }
          g.at(f, c, a, b) = acc;
        }
      }
    }
    T sum{0};
    for (int j = 0; j < delta.width; ++j) {
      for (int i = 0; i < delta.height; ++i) sum += delta.at(f, i, j);
    }
    g.bias[static_cast<std::size_t>(f)] = sum;
  }
  add_macs(macs);
  return g;
}

namespace zeroout {

template <class T>
MaxPoolResult<T> maxpool(const BasicHexTensor<T>& input, int window_side, int stride,
                         StrideRounding rounding) {
  const ConvGeometry geo = ConvGeometry::valid(input.side(), window_side, stride, rounding);
  const auto rect = embed_parallelogram(input);
  const auto pooled = rect_maxpool_reference(
      rect, window_side, stride, rect_output_size(input.side(), window_side, stride));
  MaxPoolResult<T> res{extract_hex(pooled.output, geo.output_side), {}};
  ArgmaxMap& map = res.argmax;
  map.input_side = input.side();
  map.output_side = geo.output_side;
  map.window_side = window_side;
  map.stride = stride;
  map.channels = input.channels();
  const std::size_t out_cells = res.output.cells_per_channel();
  map.winners.resize(out_cells * static_cast<std::size_t>(input.channels()));
  for (int c = 0; c < input.channels(); ++c) {
    res.output.shape().for_each_cell([&](std::size_t off, AxialIndex idx) {
      const std::uint32_t flat = pooled.winners[pooled.output.index(c, idx.u, idx.v)];
      const int y = static_cast<int>(flat) / rect.width;
      const int x = static_cast<int>(flat) % rect.width;
      map.winners[static_cast<std::size_t>(c) * out_cells + off] =
          static_cast<std::uint32_t>(input.shape().offset({y, x}));
    });
  }
  return res;
}

template <class T>
BasicHexTensor<T> avgpool(const BasicHexTensor<T>& input, int window_side, int stride,
                          StrideRounding rounding) {
  const ConvGeometry geo = ConvGeometry::valid(input.side(), window_side, stride, rounding);
  const auto pooled = rect_avgpool_reference(embed_parallelogram(input), window_side, stride,
                                             rect_output_size(input.side(), window_side, stride));
  return extract_hex(pooled, geo.output_side);
}

namespace {

// Embeds a side-L_O hex error into the full rect output grid of the forward pass.
template <class T>
BasicRectTensor<T> embed_error(const BasicHexTensor<T>& delta, int rect_size) {
  BasicRectTensor<T> r(rect_size, rect_size, delta.channels());
  for (int c = 0; c < delta.channels(); ++c) {
    auto d = delta.channel(c);
    delta.shape().for_each_cell(
        [&](std::size_t off, AxialIndex idx) { r.at(c, idx.u, idx.v) = d[off]; });
  }
  return r;
}

}  // namespace

template <class T>
BasicHexTensor<T> conv_backward_input(const BasicHexTensor<T>& delta,
                                      const BasicFilterBank<T>& filters, int stride,
                                      int input_side) {
  const int rect_out = rect_output_size(input_side, filters.side(), stride);
  const auto grad = rect_conv_backward_input(embed_error(delta, rect_out), zeroout_filter(filters),
                                             stride, 2 * input_side - 1);
  return extract_hex(grad, input_side);
}

template <class T>
FilterGradients<T> conv_backward_filter(const BasicHexTensor<T>& input,
                                        const BasicHexTensor<T>& delta, int filter_side,
                                        int stride) {
  const int rect_out = rect_output_size(input.side(), filter_side, stride);
  auto rect = rect_conv_backward_filter(embed_parallelogram(input), embed_error(delta, rect_out),
                                        filter_side, stride);
  // Corner gradients are discarded: ZeroOut keeps those weights at zero.
  const BasicFilterBank<T> hex = hex_filter(rect);
  FilterGradients<T> g;
  g.weights.assign(hex.weights().begin(), hex.weights().end());
  g.bias = std::move(rect.bias);
  return g;
}

template <class T>
BasicHexTensor<T> maxpool_backward(const BasicHexTensor<T>& delta, const ArgmaxMap& map,
                                   int input_side) {
  if (map.input_side != input_side || map.output_side != delta.side() ||
      map.channels != delta.channels()) {
    throw ShapeError("argmax map does not match this error signal / input");
  }
  const HexShape in_shape(input_side);
  const int n = in_shape.extent();
  BasicRectTensor<T> grad(n, n, delta.channels());
  for (int c = 0; c < delta.channels(); ++c) {
    auto d = delta.channel(c);
    for (std::size_t p = 0; p < d.size(); ++p) {
      const AxialIndex w = in_shape.index_at(map.winner(c, p));
      grad.at(c, w.u, w.v) += d[p];
    }
  }
  return extract_hex(grad, input_side);
}

template <class T>
BasicHexTensor<T> avgpool_backward(const BasicHexTensor<T>& delta, int window_side, int stride,
                                   int input_side) {
  ConvGeometry::valid(input_side, window_side, stride, StrideRounding::floor);
  const int rect_out = rect_output_size(input_side, window_side, stride);
  const auto d = embed_error(delta, rect_out);
  const int n = 2 * window_side - 1;
  const int size = 2 * input_side - 1;
  const T count = static_cast<T>(cell_count(window_side));
  BasicRectTensor<T> grad(size, size, delta.channels());
  for (int c = 0; c < delta.channels(); ++c) {
    for (int j = 0; j < rect_out; ++j) {
      for (int i = 0; i < rect_out; ++i) {
        const T share = d.at(c, i, j) / count;
        for (int b = 0; b < n; ++b) {
          for (int a = 0; a < n; ++a) {
            if (in_hex_window(a, b, window_side)) grad.at(c, stride * i + a, stride * j + b) += share;
          }
        }
      }
    }
  }
  return extract_hex(grad, input_side);
}

}  // namespace zeroout

#define HEXCNN_INSTANTIATE_ZEROOUT(T)                                                             \
  template struct BasicRectTensor<T>;                                                             \
  template BasicRectTensor<T> embed_parallelogram(const BasicHexTensor<T>&);                      \
  template BasicHexTensor<T> extract_hex(const BasicRectTensor<T>&, int);                         \
  template BasicZeroOutFilterBank<T> zeroout_filter(const BasicFilterBank<T>&);                   \
  template BasicFilterBank<T> hex_filter(const BasicZeroOutFilterBank<T>&);                       \
  template BasicRectTensor<T> rect_conv_reference(const BasicRectTensor<T>&,                      \
                                                  const BasicZeroOutFilterBank<T>&, int, ConvMode); \
  template BasicHexTensor<T> zeroout_conv(const BasicHexTensor<T>&, const BasicFilterBank<T>&,    \
                                          int, ConvMode, StrideRounding);                         \
  template RectPoolResult<T> rect_maxpool_reference(const BasicRectTensor<T>&, int, int, int);    \
  template BasicRectTensor<T> rect_avgpool_reference(const BasicRectTensor<T>&, int, int, int);   \
  template BasicRectTensor<T> rect_conv_backward_input(                                           \
      const BasicRectTensor<T>&, const BasicZeroOutFilterBank<T>&, int, int);                     \
  template BasicZeroOutFilterBank<T> rect_conv_backward_filter(const BasicRectTensor<T>&,         \
                                                               const BasicRectTensor<T>&, int, int); \
  template MaxPoolResult<T> zeroout::maxpool(const BasicHexTensor<T>&, int, int, StrideRounding); \
  template BasicHexTensor<T> zeroout::avgpool(const BasicHexTensor<T>&, int, int, StrideRounding); \
  template BasicHexTensor<T> zeroout::conv_backward_input(const BasicHexTensor<T>&,               \
                                                          const BasicFilterBank<T>&, int, int);   \
  template FilterGradients<T> zeroout::conv_backward_filter(const BasicHexTensor<T>&,             \
                                                            const BasicHexTensor<T>&, int, int);  \
  template BasicHexTensor<T> zeroout::maxpool_backward(const BasicHexTensor<T>&,                  \
                                                       const ArgmaxMap&, int);                    \
  template BasicHexTensor<T> zeroout::avgpool_backward(const BasicHexTensor<T>&, int, int, int);

HEXCNN_INSTANTIATE_ZEROOUT(float)
HEXCNN_INSTANTIATE_ZEROOUT(double)

#undef HEXCNN_INSTANTIATE_ZEROOUT

}  // namespace hexcnn
