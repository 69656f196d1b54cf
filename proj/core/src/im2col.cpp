#include "hexcnn/im2col.hpp"

#include <algorithm>
#include <string>

#include "hexcnn/counters.hpp"
#include "hexcnn/detail/window.hpp"
#include "hexcnn/parallel.hpp"

namespace hexcnn {

template <class T>
DenseMatrix<T>::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<T> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw ShapeError("matrix " + std::to_string(rows) + "x" + std::to_string(cols) + " needs " +
                     std::to_string(rows * cols) + " values, got " + std::to_string(data_.size()));
  }
}

std::size_t patch_count(int input_side, int filter_side, int stride) {
  const auto lp = static_cast<std::size_t>(ConvGeometry::valid(input_side, filter_side, stride).output_side);
  return 3 * lp * (lp - 1) + 1;
}

template <class T>
DenseMatrix<T> im2col(const BasicHexTensor<T>& input, int filter_side, int stride) {
  const ConvGeometry geo = ConvGeometry::valid(input.side(), filter_side, stride);
  const HexShape out_shape(geo.output_side);
  const detail::WindowRuns window{HexShape(filter_side)};
  const std::size_t k_cells = cell_count(filter_side);
  const std::size_t channels = static_cast<std::size_t>(input.channels());
  DenseMatrix<T> m(out_shape.cell_count(), channels * k_cells);
  const auto out_index = out_shape.cells();

  parallel_for(out_index.size(), 256, [&](std::size_t begin, std::size_t end) {
    std::vector<std::size_t> bases(static_cast<std::size_t>(window.columns()));
    for (std::size_t r = begin; r < end; ++r) {
      window.bases(input.shape(), stride * out_index[r].u, stride * out_index[r].v, bases.data());
      T* dst = m.row(r).data();
      for (std::size_t c = 0; c < channels; ++c) {
        const T* src = input.channel(static_cast<int>(c)).data();
        for (int j = 0; j < window.columns(); ++j) {
          const int len = window.run(j).length;
          std::copy_n(src + bases[static_cast<std::size_t>(j)], len, dst);
          dst += len;
        }
      }
    }
  });
  return m;
}

template <class T>
DenseMatrix<T> filters_to_matrix(const BasicFilterBank<T>& bank) {
  const std::size_t depth = static_cast<std::size_t>(bank.in_channels()) * bank.cells();
  DenseMatrix<T> m(depth, static_cast<std::size_t>(bank.filters()));
  for (int f = 0; f < bank.filters(); ++f) {
    std::size_t k = 0;
    for (int c = 0; c < bank.in_channels(); ++c) {
      for (T w : bank.filter(f, c)) m(k++, static_cast<std::size_t>(f)) = w;
    }
  }
  return m;
}

template <class T>
BasicFilterBank<T> matrix_to_filters(const DenseMatrix<T>& m, int in_channels, int filter_side) {
  const std::size_t k_cells = cell_count(filter_side);
  if (in_channels < 1 || m.rows() != static_cast<std::size_t>(in_channels) * k_cells ||
      m.cols() == 0) {
    throw ShapeError("filter matrix has " + std::to_string(m.rows()) + " rows; expected C*E_k = " +
                     std::to_string(static_cast<std::size_t>(std::max(in_channels, 0)) * k_cells));
  }
  BasicFilterBank<T> bank(static_cast<int>(m.cols()), in_channels, filter_side);
  for (int f = 0; f < bank.filters(); ++f) {
    std::size_t k = 0;
    for (int c = 0; c < in_channels; ++c) {
      for (T& w : bank.filter(f, c)) w = m(k++, static_cast<std::size_t>(f));
    }
  }
  return bank;
}

template <class T>
DenseMatrix<T> gemm(const DenseMatrix<T>& a, const DenseMatrix<T>& b, const GemmConfig& cfg) {
  if (a.cols() != b.rows()) {
    throw ShapeError("gemm inner dimensions differ: " + std::to_string(a.cols()) + " vs " +
                     std::to_string(b.rows()));
  }
  const std::size_t m = a.rows();
  const std::size_t n = b.cols();
  const std::size_t depth = a.cols();
  const std::size_t mb = std::max<std::size_t>(1, cfg.row_block);
  const std::size_t nb = std::max<std::size_t>(1, cfg.col_block);
  const std::size_t kb = std::max<std::size_t>(1, cfg.depth_block);
  DenseMatrix<T> c(m, n);
  if (depth == 0 || m == 0 || n == 0) return c;

  // B transposed so every output column reads a contiguous depth run.
  std::vector<T> bt(n * depth);
  for (std::size_t k = 0; k < depth; ++k) {
    for (std::size_t j = 0; j < n; ++j) bt[j * depth + k] = b(k, j);
  }

  const std::size_t row_tiles = (m + mb - 1) / mb;
  parallel_for(row_tiles, 1, [&](std::size_t tile_begin, std::size_t tile_end) {
    for (std::size_t ti = tile_begin; ti < tile_end; ++ti) {
      const std::size_t i0 = ti * mb;
      const std::size_t i1 = std::min(m, i0 + mb);
      for (std::size_t j0 = 0; j0 < n; j0 += nb) {
        const std::size_t j1 = std::min(n, j0 + nb);
        // Depth blocks run in increasing order and each element continues its
        // running sum, so the summation order is k = 0, 1, ..., depth-1.
        for (std::size_t k0 = 0; k0 < depth; k0 += kb) {
          const std::size_t k1 = std::min(depth, k0 + kb);
          std::size_t i = i0;
          for (; i + 2 <= i1; i += 2) {
            const T* a0 = &a(i, 0);
            const T* a1 = &a(i + 1, 0);
            std::size_t j = j0;
            for (; j + 2 <= j1; j += 2) {
              const T* b0 = bt.data() + j * depth;
              const T* b1 = b0 + depth;
              T c00 = c(i, j), c01 = c(i, j + 1), c10 = c(i + 1, j), c11 = c(i + 1, j + 1);
              for (std::size_t k = k0; k < k1; ++k) {
                c00 += a0[k] * b0[k];
                c01 += a0[k] * b1[k];
                c10 += a1[k] * b0[k];
                c11 += a1[k] * b1[k];
              }
              c(i, j) = c00;
              c(i, j + 1) = c01;
              c(i + 1, j) = c10;
              c(i + 1, j + 1) = c11;
            }
            for (; j < j1; ++j) {
              const T* b0 = bt.data() + j * depth;
              T c00 = c(i, j), c10 = c(i + 1, j);
              for (std::size_t k = k0; k < k1; ++k) {
                c00 += a0[k] * b0[k];
                c10 += a1[k] * b0[k];
              }
              c(i, j) = c00;
              c(i + 1, j) = c10;
            }
          }
          for (; i < i1; ++i) {
            const T* a0 = &a(i, 0);
            for (std::size_t j = j0; j < j1; ++j) {
              const T* b0 = bt.data() + j * depth;
              T acc = c(i, j);
              for (std::size_t k = k0; k < k1; ++k) acc += a0[k] * b0[k];
              c(i, j) = acc;
            }
          }
        }
      }
    }
  });
  add_macs(static_cast<std::uint64_t>(m) * n * depth);
  return c;
}

template <class T>
BasicHexTensor<T> conv_gemm(const BasicHexTensor<T>& input, const BasicFilterBank<T>& filters,
                            int stride, const GemmConfig& cfg) {
  if (filters.in_channels() != input.channels()) {
    throw ShapeError("filter bank expects " + std::to_string(filters.in_channels()) +
                     " channels, input has " + std::to_string(input.channels()));
  }
  const DenseMatrix<T> product =
      gemm(im2col(input, filters.side(), stride), filters_to_matrix(filters), cfg);
  const ConvGeometry geo = ConvGeometry::valid(input.side(), filters.side(), stride);
  BasicHexTensor<T> out(HexShape(geo.output_side), filters.filters());
  for (int f = 0; f < filters.filters(); ++f) {
    auto o = out.channel(f);
    const T b = filters.bias()[static_cast<std::size_t>(f)];
    for (std::size_t p = 0; p < o.size(); ++p) o[p] = product(p, static_cast<std::size_t>(f)) + b;
  }
  return out;
}

#define HEXCNN_INSTANTIATE_IM2COL(T)                                                           \
  template class DenseMatrix<T>;                                                               \
  template DenseMatrix<T> im2col(const BasicHexTensor<T>&, int, int);                          \
  template DenseMatrix<T> filters_to_matrix(const BasicFilterBank<T>&);                        \
  template BasicFilterBank<T> matrix_to_filters(const DenseMatrix<T>&, int, int);              \
  template DenseMatrix<T> gemm(const DenseMatrix<T>&, const DenseMatrix<T>&, const GemmConfig&); \
  template BasicHexTensor<T> conv_gemm(const BasicHexTensor<T>&, const BasicFilterBank<T>&, int, \
                                       const GemmConfig&);

HEXCNN_INSTANTIATE_IM2COL(float)
HEXCNN_INSTANTIATE_IM2COL(double)

#undef HEXCNN_INSTANTIATE_IM2COL

}  // namespace hexcnn
