#include "hexcnn/hexops.hpp"

#include <algorithm>
#include <string>

#include "hexcnn/counters.hpp"
#include "hexcnn/detail/window.hpp"
#include "hexcnn/parallel.hpp"

namespace hexcnn {
namespace {

constexpr std::size_t kCellGrain = 64;

std::string geometry_text(int li, int lk, int s) {
  return "L_I=" + std::to_string(li) + ", L_k=" + std::to_string(lk) + ", s=" + std::to_string(s);
}

}  // namespace

ConvGeometry ConvGeometry::valid(int input_side, int filter_side, int stride,
                                 StrideRounding rounding) {
  if (input_side < 1 || filter_side < 1) throw GeometryError("sides must be >= 1");
  if (stride < 1) throw GeometryError("stride must be >= 1");
  if (filter_side > input_side) {
    throw GeometryError("window larger than input (" +
                        geometry_text(input_side, filter_side, stride) + ")");
  }
  const int span = input_side - filter_side;
  if (rounding == StrideRounding::exact && span % stride != 0) {
    throw GeometryError("stride does not tile the input (" +
                        geometry_text(input_side, filter_side, stride) + ")");
  }
  ConvGeometry g;
  g.input_side = input_side;
  g.filter_side = filter_side;
  g.stride = stride;
  g.mode = ConvMode::valid;
  g.rounding = rounding;
  g.output_side = span / stride + 1;
  return g;
}

ConvGeometry ConvGeometry::full(int input_side, int filter_side) {
  if (input_side < 1 || filter_side < 1) throw GeometryError("sides must be >= 1");
  ConvGeometry g;
  g.input_side = input_side;
  g.filter_side = filter_side;
  g.stride = 1;
  g.mode = ConvMode::full;
  g.output_side = input_side + filter_side - 1;
  return g;
}

template <class T>
BasicFilterBank<T>::BasicFilterBank(int filters, int in_channels, int side)
    : filters_(filters), in_channels_(in_channels), shape_(side) {
  if (filters < 1 || in_channels < 1) throw ShapeError("filter bank needs F >= 1 and C >= 1");
  weights_.assign(static_cast<std::size_t>(filters) * static_cast<std::size_t>(in_channels) *
                      cells(),
                  T{0});
  bias_.assign(static_cast<std::size_t>(filters), T{0});
}

template <class T>
BasicFilterBank<T>::BasicFilterBank(int filters, int in_channels, int side, std::vector<T> weights,
                                    std::vector<T> bias)
    : BasicFilterBank(filters, in_channels, side) {
  if (weights.size() != weights_.size()) {
    throw ShapeError("filter bank expects " + std::to_string(weights_.size()) + " weights, got " +
                     std::to_string(weights.size()));
  }
  weights_ = std::move(weights);
  if (!bias.empty()) {
    if (bias.size() != bias_.size()) throw ShapeError("bias length must equal filter count");
    bias_ = std::move(bias);
  }
}

template <class T>
BasicHexTensor<T> conv_valid(const BasicHexTensor<T>& input, const BasicFilterBank<T>& bank,
                             int stride, StrideRounding rounding) {
  if (bank.in_channels() != input.channels()) {
    throw ShapeError("filter bank expects " + std::to_string(bank.in_channels()) +
                     " channels, input has " + std::to_string(input.channels()));
  }
  const ConvGeometry geo = ConvGeometry::valid(input.side(), bank.side(), stride, rounding);
  BasicHexTensor<T> out(HexShape(geo.output_side), bank.filters());

  const HexShape& in_shape = input.shape();
  const HexShape& out_shape = out.shape();
  const detail::WindowRuns window(bank.shape());
  const int channels = input.channels();
  const int filters = bank.filters();
  const std::size_t out_cells = out_shape.cell_count();
  const std::size_t in_cells = in_shape.cell_count();
  const std::size_t k_cells = bank.cells();
  const T* in_data = input.values().data();
  const T* w_data = bank.weights().data();
  T* out_data = out.values().data();
  const auto out_index = out_shape.cells();

  parallel_for(out_cells, kCellGrain, [&](std::size_t begin, std::size_t end) {
    std::vector<std::size_t> bases(static_cast<std::size_t>(window.columns()));
    std::uint64_t macs = 0;
    for (std::size_t p = begin; p < end; ++p) {
      const AxialIndex o = out_index[p];
      window.bases(in_shape, stride * o.u, stride * o.v, bases.data());
      for (int f = 0; f < filters; ++f) {
        T acc{0};
        for (int c = 0; c < channels; ++c) {
          const T* in_c = in_data + static_cast<std::size_t>(c) * in_cells;
          const T* w = w_data + (static_cast<std::size_t>(f) * static_cast<std::size_t>(channels) +
                                 static_cast<std::size_t>(c)) *
                                    k_cells;
          for (int j = 0; j < window.columns(); ++j) {
            const T* src = in_c + bases[static_cast<std::size_t>(j)];
            const int len = window.run(j).length;
            for (int t = 0; t < len; ++t) acc += src[t] * w[t];
            w += len;
            macs += static_cast<std::uint64_t>(len);
          }
        }
        out_data[static_cast<std::size_t>(f) * out_cells + p] = acc + bank.bias()[f];
      }
    }
    add_macs(macs);
  });
  return out;
}

template <class T>
BasicHexTensor<T> conv_full(const BasicHexTensor<T>& input, const BasicFilterBank<T>& bank) {
  return conv_valid(pad_rings(input, 2 * (bank.side() - 1)), bank, 1);
}

template <class T>
MaxPoolResult<T> maxpool(const BasicHexTensor<T>& input, int window_side, int stride,
                         StrideRounding rounding) {
  const ConvGeometry geo = ConvGeometry::valid(input.side(), window_side, stride, rounding);
  MaxPoolResult<T> res{BasicHexTensor<T>(HexShape(geo.output_side), input.channels()), {}};
  ArgmaxMap& map = res.argmax;
  map.input_side = input.side();
  map.output_side = geo.output_side;
  map.window_side = window_side;
  map.stride = stride;
  map.channels = input.channels();
  const std::size_t out_cells = res.output.cells_per_channel();
  map.winners.assign(out_cells * static_cast<std::size_t>(input.channels()), 0);

  const HexShape& in_shape = input.shape();
  const detail::WindowRuns window{HexShape(window_side)};
  const auto out_index = res.output.shape().cells();
  std::vector<std::size_t> bases(static_cast<std::size_t>(window.columns()));
  for (std::size_t p = 0; p < out_cells; ++p) {
    const AxialIndex o = out_index[p];
    window.bases(in_shape, stride * o.u, stride * o.v, bases.data());
    for (int c = 0; c < input.channels(); ++c) {
      auto in_c = input.channel(c);
      // Runs are visited in increasing storage offset, so a strict comparison
      // keeps the smallest offset among equal maxima.
      std::size_t best = bases[0];
      T best_value = in_c[best];
      for (int j = 0; j < window.columns(); ++j) {
        const std::size_t b = bases[static_cast<std::size_t>(j)];
        for (int t = 0; t < window.run(j).length; ++t) {
          if (in_c[b + static_cast<std::size_t>(t)] > best_value) {
            best_value = in_c[b + static_cast<std::size_t>(t)];
            best = b + static_cast<std::size_t>(t);
          }
        }
      }
      res.output.channel(c)[p] = best_value;
      map.winners[static_cast<std::size_t>(c) * out_cells + p] = static_cast<std::uint32_t>(best);
    }
  }
  return res;
}

template <class T>
BasicHexTensor<T> avgpool(const BasicHexTensor<T>& input, int window_side, int stride,
                          StrideRounding rounding) {
  const ConvGeometry geo = ConvGeometry::valid(input.side(), window_side, stride, rounding);
  BasicHexTensor<T> out(HexShape(geo.output_side), input.channels());
  const HexShape& in_shape = input.shape();
  const detail::WindowRuns window{HexShape(window_side)};
  const auto out_index = out.shape().cells();
  const T count = static_cast<T>(cell_count(window_side));
  std::vector<std::size_t> bases(static_cast<std::size_t>(window.columns()));
  for (std::size_t p = 0; p < out_index.size(); ++p) {
    const AxialIndex o = out_index[p];
    window.bases(in_shape, stride * o.u, stride * o.v, bases.data());
    for (int c = 0; c < input.channels(); ++c) {
      auto in_c = input.channel(c);
      T sum{0};
      for (int j = 0; j < window.columns(); ++j) {
        const std::size_t b = bases[static_cast<std::size_t>(j)];
        for (int t = 0; t < window.run(j).length; ++t) sum += in_c[b + static_cast<std::size_t>(t)];
      }
      out.channel(c)[p] = sum / count;
    }
  }
  return out;
}

template <class T>
BasicHexTensor<T> filter_tensor(const BasicFilterBank<T>& bank, int f) {
  if (f < 0 || f >= bank.filters()) throw ShapeError("filter index out of range");
  std::vector<T> data;
  data.reserve(static_cast<std::size_t>(bank.in_channels()) * bank.cells());
  for (int c = 0; c < bank.in_channels(); ++c) {
    auto w = bank.filter(f, c);
    data.insert(data.end(), w.begin(), w.end());
  }
  return BasicHexTensor<T>(bank.shape(), bank.in_channels(), std::move(data));
}

template <class T>
BasicFilterBank<T> transpose_reflect(const BasicFilterBank<T>& bank) {
  BasicFilterBank<T> out(bank.in_channels(), bank.filters(), bank.side());
  for (int f = 0; f < bank.filters(); ++f) {
    for (int c = 0; c < bank.in_channels(); ++c) {
      auto src = bank.filter(f, c);
      std::reverse_copy(src.begin(), src.end(), out.filter(c, f).begin());
    }
  }
  return out;
}

#define HEXCNN_INSTANTIATE_OPS(T)                                                            \
  template class BasicFilterBank<T>;                                                         \
  template BasicHexTensor<T> conv_valid(const BasicHexTensor<T>&, const BasicFilterBank<T>&, \
                                        int, StrideRounding);                                \
  template BasicHexTensor<T> conv_full(const BasicHexTensor<T>&, const BasicFilterBank<T>&); \
  template MaxPoolResult<T> maxpool(const BasicHexTensor<T>&, int, int, StrideRounding);     \
  template BasicHexTensor<T> avgpool(const BasicHexTensor<T>&, int, int, StrideRounding);    \
  template BasicHexTensor<T> filter_tensor(const BasicFilterBank<T>&, int);                  \
  template BasicFilterBank<T> transpose_reflect(const BasicFilterBank<T>&);

HEXCNN_INSTANTIATE_OPS(float)
HEXCNN_INSTANTIATE_OPS(double)

#undef HEXCNN_INSTANTIATE_OPS

}  // namespace hexcnn
