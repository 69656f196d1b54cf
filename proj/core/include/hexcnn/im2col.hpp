#pragma once

// Lowering of hexagonal convolution to a dense matrix product.
//
// im2col builds a P x (C*E_k) matrix whose row r is the window of output cell
// r (output storage order), flattened channel-major and, within a channel, in
// the filter's column-major order. filters_to_matrix lays filter f out as
// column f in the same order, so out = im2col(I) * W reproduces conv_valid
// with the same per-element summation order.

#include <cstddef>
#include <span>
#include <vector>

#include "hexcnn/hexops.hpp"

namespace hexcnn {

/// Dense row-major matrix.
template <class T>
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<T> data);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  T& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }
  std::span<T> row(std::size_t r) noexcept { return std::span<T>(data_).subspan(r * cols_, cols_); }
  std::span<const T> row(std::size_t r) const noexcept {
    return std::span<const T>(data_).subspan(r * cols_, cols_);
  }
  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

/// Tile sizes for the blocked multiply. The defaults keep an A panel and a
/// packed B panel resident in L1/L2 for double precision.
struct GemmConfig {
  std::size_t row_block = 64;
  std::size_t col_block = 64;
  std::size_t depth_block = 256;
};

/// Number of windows of a valid convolution: 3 l_p (l_p - 1) + 1 with
/// l_p = (L_I - L_k)/s + 1.
std::size_t patch_count(int input_side, int filter_side, int stride);

template <class T>
DenseMatrix<T> im2col(const BasicHexTensor<T>& input, int filter_side, int stride);

/// (C*E_k) x F matrix; column f holds filter f.
template <class T>
DenseMatrix<T> filters_to_matrix(const BasicFilterBank<T>& filters);

/// Inverse of filters_to_matrix. Bias is not part of the matrix and is zero.
template <class T>
BasicFilterBank<T> matrix_to_filters(const DenseMatrix<T>& m, int in_channels, int filter_side);

/// Cache-blocked product A*B. Each output element sums its k terms in
/// increasing k order, independent of the tile sizes and thread count.
template <class T>
DenseMatrix<T> gemm(const DenseMatrix<T>& a, const DenseMatrix<T>& b, const GemmConfig& cfg = {});

/// conv_valid computed as gemm(im2col(I), filters_to_matrix(K)) plus bias.
template <class T>
BasicHexTensor<T> conv_gemm(const BasicHexTensor<T>& input, const BasicFilterBank<T>& filters,
                            int stride, const GemmConfig& cfg = {});

}  // namespace hexcnn
