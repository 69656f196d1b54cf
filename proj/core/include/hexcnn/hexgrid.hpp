#pragma once

// Hexagonal lattice geometry and storage.
//
// A hexagon of side L is addressed in a skewed axial frame with the origin at
// the top-left cell: u is the row, v the column, and a pair (u, v) is a cell
// iff 0 <= u, v <= 2L-2 and |u - v| <= L-1.  Cells are stored column-major
// (all cells of column 0 top to bottom, then column 1, ...) with no slack, so
// one channel holds exactly 3L(L-1)+1 values.

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hexcnn/errors.hpp"

namespace hexcnn {

struct AxialIndex {
  int u = 0;  // row
  int v = 0;  // column

  friend bool operator==(const AxialIndex&, const AxialIndex&) = default;
};

/// Inclusive index interval.
struct IndexRange {
  int lo = 0;
  int hi = -1;

  int length() const noexcept { return hi - lo + 1; }
  friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

/// Number of cells in a hexagon of the given side: 3L(L-1)+1.
std::size_t cell_count(int side);

/// Column range [v_min, v_max] of row u.
IndexRange row_bounds(int side, int u);

/// Row range [u_min, u_max] of column v.
IndexRange col_bounds(int side, int v);

class HexShape {
 public:
  HexShape() : HexShape(1) {}
  explicit HexShape(int side);

  int side() const noexcept { return side_; }
  /// Rows (and columns) spanned by the hexagon: 2L-1.
  int extent() const noexcept { return 2 * side_ - 1; }
  std::size_t cell_count() const noexcept { return cells_; }

  bool contains(int u, int v) const noexcept {
    const int last = 2 * side_ - 2;
    return u >= 0 && v >= 0 && u <= last && v <= last && u - v < side_ && v - u < side_;
  }
  bool contains(AxialIndex idx) const noexcept { return contains(idx.u, idx.v); }

  int col_min(int v) const noexcept { return v - side_ + 1 > 0 ? v - side_ + 1 : 0; }
  int col_max(int v) const noexcept {
    return v + side_ - 1 < 2 * side_ - 2 ? v + side_ - 1 : 2 * side_ - 2;
  }
  int col_length(int v) const noexcept { return col_max(v) - col_min(v) + 1; }

  /// Storage offset of the first cell of column v.
  std::size_t column_start(int v) const noexcept {
    if (v <= side_) return column_start_low(v);
    return cells_ - column_start_low(2 * side_ - 1 - v);
  }

  /// Offset of (u, v) within one channel; no validity check beyond a debug assert.
  std::size_t offset_unchecked(int u, int v) const noexcept {
    assert(contains(u, v));
    return column_start(v) + static_cast<std::size_t>(u - col_min(v));
  }

  /// Offset of idx within one channel. Throws ShapeError if idx is not a cell.
  std::size_t offset(AxialIndex idx) const;

  /// Inverse of offset().
  AxialIndex index_at(std::size_t offset) const;

  /// Central point reflection (u, v) -> (2L-2-u, 2L-2-v).
  AxialIndex reflect(AxialIndex idx) const;

  /// Visits every cell in storage order as fn(offset, AxialIndex).
  template <class Fn>
  void for_each_cell(Fn&& fn) const {
    std::size_t off = 0;
    for (int v = 0; v < extent(); ++v) {
      for (int u = col_min(v); u <= col_max(v); ++u) fn(off++, AxialIndex{u, v});
    }
  }

  /// All cells in storage order.
  std::vector<AxialIndex> cells() const;

  friend bool operator==(const HexShape& a, const HexShape& b) noexcept {
    return a.side_ == b.side_;
  }

 private:
  std::size_t column_start_low(int v) const noexcept {
    const auto vv = static_cast<std::size_t>(v);
    return vv * static_cast<std::size_t>(side_) + vv * (vv - 1) / 2;
  }

  int side_;
  std::size_t cells_;
};

std::size_t flat_offset(int side, AxialIndex idx);
AxialIndex point_reflect(int side, AxialIndex idx);

/// Hexagon-shaped multi-channel array, channel-major then column-major.
template <class T>
class BasicHexTensor {
 public:
  using value_type = T;

  BasicHexTensor() : BasicHexTensor(HexShape(1), 1) {}
  BasicHexTensor(HexShape shape, int channels);
  BasicHexTensor(HexShape shape, int channels, std::vector<T> data);

  const HexShape& shape() const noexcept { return shape_; }
  int side() const noexcept { return shape_.side(); }
  int channels() const noexcept { return channels_; }
  std::size_t cells_per_channel() const noexcept { return shape_.cell_count(); }
  std::size_t size() const noexcept { return data_.size(); }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }

  std::span<T> channel(int c) noexcept {
    assert(c >= 0 && c < channels_);
    return std::span<T>(data_).subspan(static_cast<std::size_t>(c) * cells_per_channel(),
                                       cells_per_channel());
  }
  std::span<const T> channel(int c) const noexcept {
    assert(c >= 0 && c < channels_);
    return std::span<const T>(data_).subspan(static_cast<std::size_t>(c) * cells_per_channel(),
                                             cells_per_channel());
  }

  T& at(int c, AxialIndex idx) { return channel(c)[shape_.offset(idx)]; }
  const T& at(int c, AxialIndex idx) const { return channel(c)[shape_.offset(idx)]; }

  std::vector<T>& storage() noexcept { return data_; }
  const std::vector<T>& storage() const noexcept { return data_; }

  bool same_layout(const BasicHexTensor& other) const noexcept {
    return shape_ == other.shape_ && channels_ == other.channels_;
  }

  friend bool operator==(const BasicHexTensor&, const BasicHexTensor&) = default;

 private:
  HexShape shape_;
  int channels_;
  std::vector<T> data_;
};

using HexTensor = BasicHexTensor<double>;
using HexTensorF = BasicHexTensor<float>;

/// Surrounds every channel with `rings` rings of zeros; cell (u,v) moves to (u+r, v+r).
template <class T>
BasicHexTensor<T> pad_rings(const BasicHexTensor<T>& t, int rings);

/// Point-reflects every channel (the hexagonal rot180).
template <class T>
BasicHexTensor<T> rot180_filter(const BasicHexTensor<T>& k);

/// Copies t into a hexagon of side `side` sharing the top-left origin. Cells
/// that do not exist in the target are dropped; new cells are zero.
template <class T>
BasicHexTensor<T> resize_top_left(const BasicHexTensor<T>& t, int side);

std::string describe(const HexShape& shape, int channels);

}  // namespace hexcnn
