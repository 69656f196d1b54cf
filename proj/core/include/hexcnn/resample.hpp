#pragma once

// Square-lattice to hex-lattice resampling and the padding overhead of
// covering a square image with a hexagon.

#include <cstdint>
#include <vector>

#include "hexcnn/hexgrid.hpp"

namespace hexcnn {

/// Row-major image, channel-interleaved (h, w, c), unit pixel pitch. Pixel
/// (row y, column x) is centred at plane position (x, y).
struct SquareImage {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<float> data;

  SquareImage() = default;
  SquareImage(int h, int w, int c);

  float& at(int y, int x, int c) { return data[index(y, x, c)]; }
  float at(int y, int x, int c) const { return data[index(y, x, c)]; }
  std::size_t index(int y, int x, int c) const noexcept {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
            static_cast<std::size_t>(x)) *
               static_cast<std::size_t>(channels) +
           static_cast<std::size_t>(c);
  }
};

/// Placement of hex cell centres in the image plane (y grows downwards).
/// A step along v moves by scale*(1, 0); a step along u moves by
/// scale*(-1/2, sqrt(3)/2). Nearest neighbours are `scale` apart.
struct HexLatticeGeometry {
  double scale = 1.0;
};

struct PlanePoint {
  double x = 0.0;
  double y = 0.0;
};

/// Smallest hexagon side covering an x-by-x square: ceil((3x+1)/4).
int min_cover_side(int square_side);

/// Centre of cell idx of a side-L hexagon whose centre cell sits at `centre`.
PlanePoint cell_center(const HexShape& shape, AxialIndex idx, const HexLatticeGeometry& geom,
                       PlanePoint centre);

/// Bilinear sample at (x, y); zero outside [0, w-1] x [0, h-1].
double bilinear_sample(const SquareImage& img, double x, double y, int channel);

/// Resamples img onto a side-L hexagon centred on the image centre.
HexTensor square_to_hex(const SquareImage& img, int side, const HexLatticeGeometry& geom = {});

/// Lattice scale that stretches the middle row of a side-L hexagon across
/// the longer image edge, keeping every cell centre inside a square image.
double fit_scale(const SquareImage& img, int side);

/// ceil(sqrt(3) * x), computed exactly in integers.
std::int64_t ceil_sqrt3_times(std::int64_t x);

struct OverheadReport {
  int square_side = 0;
  int hex_side = 0;
  std::int64_t square_cells = 0;
  std::int64_t hex_cells = 0;
  std::int64_t zeroout_cells = 0;
  std::int64_t quasih_cells = 0;
  /// Cells beyond the x*x image, relative to x*x.
  double hex_pad_fraction = 0.0;
  double zeroout_pad_fraction = 0.0;
  /// Asymptotic geometric padded areas (multiples of x^2) quoted for
  /// square-input covering; reported alongside the cell-count fractions.
  static constexpr double kHexPadAreaConstant = 0.563;
  static constexpr double kZeroOutPadAreaConstant = 0.577;
};

OverheadReport overhead_report(int square_side);

}  // namespace hexcnn
