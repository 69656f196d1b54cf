#pragma once

// Closed-form memory footprints of HexCNN and the rectangle-embedding
// baselines for a hexagonal input of side x (cells, not bytes).

#include <cstdint>

namespace hexcnn {

struct SpaceParams {
  int channels = 3;
  int filters = 1;
  int filter_side = 2;
  int stride = 1;
};

struct SpaceRow {
  int side = 0;
  SpaceParams params;

  // Input storage, all channels.
  std::int64_t hex_input = 0;       // C * (3x(x-1)+1)
  std::int64_t zeroout_input = 0;   // C * (2x-1)^2, parallelogram embedding
  std::int64_t quasih_input = 0;    // C * (2x-1) * ceil(sqrt(3) x)

  // Patch counts and im2col footprints (patch matrix plus filter matrix).
  std::int64_t hex_patches = 0;
  std::int64_t zeroout_patches = 0;
  std::int64_t quasih_patches = 0;
  std::int64_t hex_im2col = 0;      // hex_patches * C * E_k
  std::int64_t zeroout_im2col = 0;  // zeroout_patches * C * (2L_k-1)^2
  std::int64_t quasih_im2col = 0;
  std::int64_t hex_filters = 0;     // F * C * E_k
  std::int64_t rect_filters = 0;    // F * C * (2L_k-1)^2

  // Savings, in percent, relative to each baseline.
  double input_saving_vs_zeroout = 0.0;
  double input_saving_vs_quasih = 0.0;
  double conv_saving_vs_zeroout = 0.0;
  double conv_saving_vs_quasih = 0.0;
};

/// Throws GeometryError when the filter does not fit the input side.
SpaceRow space_row(int side, const SpaceParams& params = {});

}  // namespace hexcnn
