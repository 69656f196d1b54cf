#include "hexcnn/resample.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hexcnn {
namespace {

constexpr double kHalfSqrt3 = 0.86602540378443864676;
// Sample positions that land within this distance outside the image are
// snapped onto the border; they come from rounding in cell_center().
constexpr double kEdgeSlack = 1e-9;

}  // namespace

SquareImage::SquareImage(int h, int w, int c) : height(h), width(w), channels(c) {
  if (h < 1 || w < 1 || c < 1) throw ShapeError("image dimensions must be >= 1");
  data.assign(static_cast<std::size_t>(h) * static_cast<std::size_t>(w) *
                  static_cast<std::size_t>(c),
              0.0f);
}

int min_cover_side(int square_side) {
  if (square_side < 1) throw ShapeError("square side must be >= 1");
  return (3 * square_side + 1 + 3) / 4;
}

PlanePoint cell_center(const HexShape& shape, AxialIndex idx, const HexLatticeGeometry& geom,
                       PlanePoint centre) {
  const int mid = shape.side() - 1;
  const double du = idx.u - mid;
  const double dv = idx.v - mid;
  return {centre.x + geom.scale * (dv - 0.5 * du), centre.y + geom.scale * kHalfSqrt3 * du};
}

double bilinear_sample(const SquareImage& img, double x, double y, int channel) {
  const double max_x = img.width - 1;
  const double max_y = img.height - 1;
  if (x < -kEdgeSlack || y < -kEdgeSlack || x > max_x + kEdgeSlack || y > max_y + kEdgeSlack) {
    return 0.0;
  }
  x = std::clamp(x, 0.0, max_x);
  y = std::clamp(y, 0.0, max_y);
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const int x1 = std::min(x0 + 1, img.width - 1);
  const int y1 = std::min(y0 + 1, img.height - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  const double top = (1.0 - fx) * img.at(y0, x0, channel) + fx * img.at(y0, x1, channel);
  const double bottom = (1.0 - fx) * img.at(y1, x0, channel) + fx * img.at(y1, x1, channel);
  return (1.0 - fy) * top + fy * bottom;
}

HexTensor square_to_hex(const SquareImage& img, int side, const HexLatticeGeometry& geom) {
  if (!(geom.scale > 0.0)) throw ShapeError("lattice scale must be positive");
  HexTensor out(HexShape(side), img.channels);
  const PlanePoint centre{(img.width - 1) / 2.0, (img.height - 1) / 2.0};
  for (int c = 0; c < img.channels; ++c) {
    auto o = out.channel(c);
    out.shape().for_each_cell([&](std::size_t off, AxialIndex idx) {
      const PlanePoint p = cell_center(out.shape(), idx, geom, centre);
      o[off] = bilinear_sample(img, p.x, p.y, c);
    });
  }
  return out;
}

double fit_scale(const SquareImage& img, int side) {
  if (side <= 1) return 1.0;
  const int longest = std::max(img.height, img.width);
  if (longest <= 1) return 1.0;
  return static_cast<double>(longest - 1) / (2.0 * (side - 1));
}

std::int64_t ceil_sqrt3_times(std::int64_t x) {
  if (x <= 0) return 0;
  const std::int64_t target = 3 * x * x;
  auto n = static_cast<std::int64_t>(std::sqrt(static_cast<double>(target)));
  while (n * n < target) ++n;
  while (n > 0 && (n - 1) * (n - 1) >= target) --n;
  return n;
}

OverheadReport overhead_report(int square_side) {
  OverheadReport r;
  r.square_side = square_side;
  r.hex_side = min_cover_side(square_side);
  const std::int64_t x = square_side;
  const std::int64_t y = r.hex_side;
  r.square_cells = x * x;
  r.hex_cells = 3 * y * (y - 1) + 1;
  r.zeroout_cells = (2 * y - 1) * (2 * y - 1);
  r.quasih_cells = (2 * x - 1) * ceil_sqrt3_times(x);
  r.hex_pad_fraction = static_cast<double>(r.hex_cells - r.square_cells) / r.square_cells;
  r.zeroout_pad_fraction = static_cast<double>(r.zeroout_cells - r.square_cells) / r.square_cells;
  return r;
}

}  // namespace hexcnn
