#include "hexcnn/hexgrid.hpp"

#include <algorithm>

namespace hexcnn {

std::size_t cell_count(int side) {
  if (side < 1) throw ShapeError("hexagon side must be >= 1, got " + std::to_string(side));
  const auto l = static_cast<std::size_t>(side);
  return 3 * l * (l - 1) + 1;
}

IndexRange row_bounds(int side, int u) {
  const HexShape shape(side);
  if (u < 0 || u > 2 * side - 2) {
    throw ShapeError("row " + std::to_string(u) + " outside hexagon of side " +
                     std::to_string(side));
  }
  // The cell set is symmetric under u <-> v.
  return {shape.col_min(u), shape.col_max(u)};
}

IndexRange col_bounds(int side, int v) {
  const HexShape shape(side);
  if (v < 0 || v > 2 * side - 2) {
    throw ShapeError("column " + std::to_string(v) + " outside hexagon of side " +
                     std::to_string(side));
  }
  return {shape.col_min(v), shape.col_max(v)};
}

HexShape::HexShape(int side) : side_(side), cells_(hexcnn::cell_count(side)) {}

std::size_t HexShape::offset(AxialIndex idx) const {
  if (!contains(idx)) {
    throw ShapeError("(" + std::to_string(idx.u) + "," + std::to_string(idx.v) +
                     ") is not a cell of a side-" + std::to_string(side_) + " hexagon");
  }
  return offset_unchecked(idx.u, idx.v);
}

AxialIndex HexShape::index_at(std::size_t off) const {
  if (off >= cells_) throw ShapeError("storage offset out of range");
  // Columns are few (2L-1); a linear scan keeps this simple and exact.
  int v = 0;
  while (v + 1 < extent() && column_start(v + 1) <= off) ++v;
  return {col_min(v) + static_cast<int>(off - column_start(v)), v};
}

AxialIndex HexShape::reflect(AxialIndex idx) const {
  if (!contains(idx)) {
    throw ShapeError("cannot reflect a non-cell of a side-" + std::to_string(side_) + " hexagon");
  }
  return {2 * side_ - 2 - idx.u, 2 * side_ - 2 - idx.v};
}

std::vector<AxialIndex> HexShape::cells() const {
  std::vector<AxialIndex> out;
  out.reserve(cells_);
  for_each_cell([&](std::size_t, AxialIndex idx) { out.push_back(idx); });
  return out;
}

std::size_t flat_offset(int side, AxialIndex idx) { return HexShape(side).offset(idx); }

AxialIndex point_reflect(int side, AxialIndex idx) { return HexShape(side).reflect(idx); }

std::string describe(const HexShape& shape, int channels) {
  return "[side=" + std::to_string(shape.side()) + ", channels=" + std::to_string(channels) + "]";
}

template <class T>
BasicHexTensor<T>::BasicHexTensor(HexShape shape, int channels)
    : shape_(shape), channels_(channels) {
  if (channels < 1) throw ShapeError("tensor needs at least one channel");
  data_.assign(static_cast<std::size_t>(channels) * shape_.cell_count(), T{0});
}

template <class T>
BasicHexTensor<T>::BasicHexTensor(HexShape shape, int channels, std::vector<T> data)
    : shape_(shape), channels_(channels), data_(std::move(data)) {
  if (channels < 1) throw ShapeError("tensor needs at least one channel");
  const std::size_t expected = static_cast<std::size_t>(channels) * shape_.cell_count();
  if (data_.size() != expected) {
    throw ShapeError("tensor " + describe(shape_, channels) + " needs " + std::to_string(expected) +
                     " values, got " + std::to_string(data_.size()));
  }
}

template <class T>
BasicHexTensor<T> pad_rings(const BasicHexTensor<T>& t, int rings) {
  if (rings < 0) throw ShapeError("ring count must be non-negative");
  if (rings == 0) return t;
  BasicHexTensor<T> out(HexShape(t.side() + rings), t.channels());
  const HexShape& src = t.shape();
  const HexShape& dst = out.shape();
  for (int c = 0; c < t.channels(); ++c) {
    auto in = t.channel(c);
    auto o = out.channel(c);
    // Each source column stays contiguous after the shift.
    for (int v = 0; v < src.extent(); ++v) {
      const std::size_t from = src.column_start(v);
      const std::size_t to = dst.offset_unchecked(src.col_min(v) + rings, v + rings);
      std::copy_n(in.begin() + static_cast<std::ptrdiff_t>(from), src.col_length(v),
                  o.begin() + static_cast<std::ptrdiff_t>(to));
    }
  }
  return out;
}

template <class T>
BasicHexTensor<T> rot180_filter(const BasicHexTensor<T>& k) {
  // Point reflection reverses storage order: column 2L-2-v holds the
  // reflected cells of column v, and rows flip within a column.
  BasicHexTensor<T> out(k.shape(), k.channels());
  for (int c = 0; c < k.channels(); ++c) {
    auto in = k.channel(c);
    std::reverse_copy(in.begin(), in.end(), out.channel(c).begin());
  }
  return out;
}

template <class T>
BasicHexTensor<T> resize_top_left(const BasicHexTensor<T>& t, int side) {
  BasicHexTensor<T> out(HexShape(side), t.channels());
  const HexShape& src = t.shape();
  const HexShape& dst = out.shape();
  for (int c = 0; c < t.channels(); ++c) {
    auto in = t.channel(c);
    auto o = out.channel(c);
    src.for_each_cell([&](std::size_t off, AxialIndex idx) {
      if (dst.contains(idx)) o[dst.offset_unchecked(idx.u, idx.v)] = in[off];
    });
  }
  return out;
}

template class BasicHexTensor<float>;
template class BasicHexTensor<double>;
template BasicHexTensor<float> pad_rings(const BasicHexTensor<float>&, int);
template BasicHexTensor<double> pad_rings(const BasicHexTensor<double>&, int);
template BasicHexTensor<float> rot180_filter(const BasicHexTensor<float>&);
template BasicHexTensor<double> rot180_filter(const BasicHexTensor<double>&);
template BasicHexTensor<float> resize_top_left(const BasicHexTensor<float>&, int);
template BasicHexTensor<double> resize_top_left(const BasicHexTensor<double>&, int);

}  // namespace hexcnn
