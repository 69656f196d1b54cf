#include "hexcnn/hexgrad.hpp"

#include <string>

#include "hexcnn/detail/window.hpp"
#include "hexcnn/parallel.hpp"

namespace hexcnn {
namespace {

// Checks that a forward conv/pool with these sides is consistent and returns
// the output side it would produce.
int forward_output_side(int input_side, int window_side, int stride) {
  return ConvGeometry::valid(input_side, window_side, stride, StrideRounding::floor).output_side;
}

void check_delta(int delta_side, int input_side, int window_side, int stride) {
  const int expected = forward_output_side(input_side, window_side, stride);
  if (delta_side != expected) {
    throw GeometryError("error signal has side " + std::to_string(delta_side) +
                        ", forward pass produced side " + std::to_string(expected));
  }
}

}  // namespace

template <class T>
BasicHexTensor<T> upsample_stride(const BasicHexTensor<T>& delta, int stride, int target_side) {
  if (stride < 1) throw GeometryError("stride must be >= 1");
  if (target_side != (delta.side() - 1) * stride + 1) {
    throw GeometryError("upsample target side must be (L_O-1)*s+1 = " +
                        std::to_string((delta.side() - 1) * stride + 1));
  }
  if (stride == 1) return delta;
  BasicHexTensor<T> out(HexShape(target_side), delta.channels());
  const HexShape& dst = out.shape();
  for (int c = 0; c < delta.channels(); ++c) {
    auto in = delta.channel(c);
    auto o = out.channel(c);
    delta.shape().for_each_cell([&](std::size_t off, AxialIndex idx) {
      o[dst.offset_unchecked(stride * idx.u, stride * idx.v)] = in[off];
    });
  }
  return out;
}

template <class T>
BasicHexTensor<T> conv_backward_input(const BasicHexTensor<T>& delta,
                                      const BasicFilterBank<T>& filters, int stride,
                                      int input_side) {
  if (delta.channels() != filters.filters()) {
    throw ShapeError("error signal has " + std::to_string(delta.channels()) +
                     " channels, filter bank has " + std::to_string(filters.filters()) +
                     " filters");
  }
  check_delta(delta.side(), input_side, filters.side(), stride);
  const int dense_side = (delta.side() - 1) * stride + 1;
  BasicHexTensor<T> grad =
      conv_full(upsample_stride(delta, stride, dense_side), transpose_reflect(filters));
  // Exact tiling gives side (L_O-1)s + L_k == L_I; floor rounding leaves an
  // untouched margin of input cells.
  if (grad.side() != input_side) grad = resize_top_left(grad, input_side);
  return grad;
}

template <class T>
FilterGradients<T> conv_backward_filter(const BasicHexTensor<T>& input,
                                        const BasicHexTensor<T>& delta, int filter_side,
                                        int stride) {
  check_delta(delta.side(), input.side(), filter_side, stride);
  const HexShape k_shape(filter_side);
  const detail::WindowRuns window(k_shape);
  const int channels = input.channels();
  const int filters = delta.channels();
  const std::size_t k_cells = k_shape.cell_count();
  const auto out_index = delta.shape().cells();

  FilterGradients<T> g;
  g.weights.assign(static_cast<std::size_t>(filters) * static_cast<std::size_t>(channels) * k_cells,
                   T{0});
  g.bias.assign(static_cast<std::size_t>(filters), T{0});

  // Anchor run bases depend only on the output cell; compute them once.
  const std::size_t cols = static_cast<std::size_t>(window.columns());
  std::vector<std::size_t> bases(out_index.size() * cols);
  for (std::size_t p = 0; p < out_index.size(); ++p) {
    window.bases(input.shape(), stride * out_index[p].u, stride * out_index[p].v,
                 bases.data() + p * cols);
  }

  // Each (filter, channel) pair owns a disjoint slice of the gradient, and
  // within it every weight accumulates over output cells in storage order.
  const std::size_t pairs = static_cast<std::size_t>(filters) * static_cast<std::size_t>(channels);
  parallel_for(pairs, 1, [&](std::size_t begin, std::size_t end) {
    for (std::size_t fc = begin; fc < end; ++fc) {
      const int f = static_cast<int>(fc / static_cast<std::size_t>(channels));
      const int c = static_cast<int>(fc % static_cast<std::size_t>(channels));
      auto d = delta.channel(f);
      auto in_c = input.channel(c);
      T* gw = g.weights.data() + fc * k_cells;
      for (std::size_t p = 0; p < out_index.size(); ++p) {
        const T dp = d[p];
        std::size_t e = 0;
        for (std::size_t j = 0; j < cols; ++j) {
          const T* src = in_c.data() + bases[p * cols + j];
          const int len = window.run(static_cast<int>(j)).length;
          for (int t = 0; t < len; ++t) gw[e + static_cast<std::size_t>(t)] += dp * src[t];
          e += static_cast<std::size_t>(len);
        }
      }
    }
  });

  for (int f = 0; f < filters; ++f) {
    T sum{0};
    for (T v : delta.channel(f)) sum += v;
    g.bias[static_cast<std::size_t>(f)] = sum;
  }
  return g;
}

template <class T>
BasicHexTensor<T> maxpool_backward(const BasicHexTensor<T>& delta, const ArgmaxMap& map,
                                   int input_side) {
  if (map.input_side != input_side || map.output_side != delta.side() ||
      map.channels != delta.channels() ||
      map.winners.size() != delta.size()) {
    throw ShapeError("argmax map does not match this error signal / input");
  }
  BasicHexTensor<T> grad(HexShape(input_side), delta.channels());
  const std::size_t in_cells = grad.cells_per_channel();
  for (int c = 0; c < delta.channels(); ++c) {
    auto d = delta.channel(c);
    auto g = grad.channel(c);
    for (std::size_t p = 0; p < d.size(); ++p) {
      const std::uint32_t w = map.winner(c, p);
      if (w >= in_cells) throw ShapeError("argmax map points outside the input");
      g[w] += d[p];
    }
  }
  return grad;
}

template <class T>
BasicHexTensor<T> avgpool_backward(const BasicHexTensor<T>& delta, int window_side, int stride,
                                   int input_side) {
  check_delta(delta.side(), input_side, window_side, stride);
  BasicHexTensor<T> grad(HexShape(input_side), delta.channels());
  const detail::WindowRuns window{HexShape(window_side)};
  const T count = static_cast<T>(cell_count(window_side));
  const auto out_index = delta.shape().cells();
  std::vector<std::size_t> bases(static_cast<std::size_t>(window.columns()));
  for (std::size_t p = 0; p < out_index.size(); ++p) {
    window.bases(grad.shape(), stride * out_index[p].u, stride * out_index[p].v, bases.data());
    for (int c = 0; c < delta.channels(); ++c) {
      const T share = delta.channel(c)[p] / count;
      auto g = grad.channel(c);
      for (int j = 0; j < window.columns(); ++j) {
        const std::size_t b = bases[static_cast<std::size_t>(j)];
        for (int t = 0; t < window.run(j).length; ++t) g[b + static_cast<std::size_t>(t)] += share;
      }
    }
  }
  return grad;
}

template <class T>
BasicHexTensor<T> apply_activation(const BasicHexTensor<T>& preact, Activation kind) {
  if (kind == Activation::identity) return preact;
  BasicHexTensor<T> out = preact;
  for (T& v : out.values()) v = v > T{0} ? v : T{0};
  return out;
}

template <class T>
BasicHexTensor<T> apply_activation_backward(const BasicHexTensor<T>& delta,
                                            const BasicHexTensor<T>& preact, Activation kind) {
  if (!delta.same_layout(preact)) {
    throw ShapeError("activation backward: error " + describe(delta.shape(), delta.channels()) +
                     " vs pre-activation " + describe(preact.shape(), preact.channels()));
  }
  if (kind == Activation::identity) return delta;
  BasicHexTensor<T> out = delta;
  auto pre = preact.values();
  auto o = out.values();
  for (std::size_t i = 0; i < o.size(); ++i) {
    if (!(pre[i] > T{0})) o[i] = T{0};
  }
  return out;
}

#define HEXCNN_INSTANTIATE_GRAD(T)                                                               \
  template BasicHexTensor<T> upsample_stride(const BasicHexTensor<T>&, int, int);                \
  template BasicHexTensor<T> conv_backward_input(const BasicHexTensor<T>&,                       \
                                                 const BasicFilterBank<T>&, int, int);           \
  template FilterGradients<T> conv_backward_filter(const BasicHexTensor<T>&,                     \
                                                   const BasicHexTensor<T>&, int, int);          \
  template BasicHexTensor<T> maxpool_backward(const BasicHexTensor<T>&, const ArgmaxMap&, int);  \
  template BasicHexTensor<T> avgpool_backward(const BasicHexTensor<T>&, int, int, int);          \
  template BasicHexTensor<T> apply_activation(const BasicHexTensor<T>&, Activation);             \
  template BasicHexTensor<T> apply_activation_backward(const BasicHexTensor<T>&,                 \
                                                       const BasicHexTensor<T>&, Activation);

HEXCNN_INSTANTIATE_GRAD(float)
HEXCNN_INSTANTIATE_GRAD(double)

#undef HEXCNN_INSTANTIATE_GRAD

}  // namespace hexcnn
