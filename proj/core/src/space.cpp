#include "hexcnn/space.hpp"

#include "hexcnn/hexops.hpp"
#include "hexcnn/resample.hpp"

namespace hexcnn {
namespace {

double saving(std::int64_t ours, std::int64_t theirs) {
  return 100.0 * (1.0 - static_cast<double>(ours) / static_cast<double>(theirs));
}

std::int64_t rect_patches(std::int64_t extent, std::int64_t window, std::int64_t stride) {
  return (extent - window) / stride + 1;
}

}  // namespace

SpaceRow space_row(int side, const SpaceParams& params) {
  const ConvGeometry geo = ConvGeometry::valid(side, params.filter_side, params.stride);
  SpaceRow r;
  r.side = side;
  r.params = params;
  const std::int64_t c = params.channels;
  const std::int64_t f = params.filters;
  const std::int64_t x = side;
  const std::int64_t lp = geo.output_side;
  const std::int64_t ek = static_cast<std::int64_t>(cell_count(params.filter_side));
  const std::int64_t rk = 2 * static_cast<std::int64_t>(params.filter_side) - 1;
  const std::int64_t quasi_h = ceil_sqrt3_times(x);

  r.hex_input = c * (3 * x * (x - 1) + 1);
  r.zeroout_input = c * (2 * x - 1) * (2 * x - 1);
  r.quasih_input = c * (2 * x - 1) * quasi_h;

  r.hex_patches = 3 * lp * (lp - 1) + 1;
  const std::int64_t zo_side = rect_patches(2 * x - 1, rk, params.stride);
  r.zeroout_patches = zo_side * zo_side;
  r.quasih_patches =
      rect_patches(2 * x - 1, rk, params.stride) * rect_patches(quasi_h, rk, params.stride);
  r.hex_im2col = r.hex_patches * c * ek;
  r.zeroout_im2col = r.zeroout_patches * c * rk * rk;
  r.quasih_im2col = r.quasih_patches * c * rk * rk;
  r.hex_filters = f * c * ek;
  r.rect_filters = f * c * rk * rk;

  r.input_saving_vs_zeroout = saving(r.hex_input, r.zeroout_input);
  r.input_saving_vs_quasih = saving(r.hex_input, r.quasih_input);
  r.conv_saving_vs_zeroout = saving(r.hex_im2col, r.zeroout_im2col);
  r.conv_saving_vs_quasih = saving(r.hex_im2col, r.quasih_im2col);
  return r;
}

}  // namespace hexcnn
