#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "hexcnn/counters.hpp"
#include "hexcnn/hexops.hpp"
#include "hexcnn/zeroout.hpp"
#include "test_support.hpp"

namespace hexcnn {
namespace {

using testing::oracle_cells;
using testing::random_bank;
using testing::random_tensor;
using testing::rel_error;

HexTensor iota_tensor(int side, double start) {
  HexTensor t(HexShape(side), 1);
  std::iota(t.values().begin(), t.values().end(), start);
  return t;
}

TEST(ConvValid, WindowCoveringWholeInput) {
  const HexTensor in = iota_tensor(2, 1.0);
  FilterBank k(1, 1, 2, std::vector<double>(7, 1.0));
  const HexTensor out = conv_valid(in, k, 1);
  ASSERT_EQ(out.side(), 1);
  EXPECT_EQ(out.values()[0], 28.0);
}

TEST(ConvValid, DeltaFilterCropsInput) {
  Rng rng(5);
  for (int stride : {1, 2, 3}) {
    const int side_k = 2;
    const int side_in = side_k + 2 * stride;
    const HexTensor in = random_tensor(rng, side_in, 1);
    FilterBank k(1, 1, side_k);
    k.filter(0, 0)[0] = 1.0;  // cell (0,0)
    const HexTensor out = conv_valid(in, k, stride);
    out.shape().for_each_cell([&](std::size_t off, AxialIndex p) {
      EXPECT_EQ(out.values()[off], in.at(0, {stride * p.u, stride * p.v}));
    });
  }
}

TEST(ConvValid, SideThreeAllOnesMatchesFrozenOracle) {
  // Frozen from the brute-force enumeration in tests/oracles/hex_oracle.py.
  const std::vector<double> expected = {37, 44, 63, 70, 77, 96, 103};
  const HexTensor in = iota_tensor(3, 1.0);
  FilterBank k(1, 1, 2, std::vector<double>(7, 1.0));
  const HexTensor out = conv_valid(in, k, 1);
  ASSERT_EQ(out.side(), 2);
  EXPECT_EQ(std::vector<double>(out.values().begin(), out.values().end()), expected);
  const HexTensor zo = zeroout_conv(in, k, 1);
  EXPECT_EQ(std::vector<double>(zo.values().begin(), zo.values().end()), expected);
}

TEST(ConvValid, MatchesCoordinateOracleAndZeroOut) {
  Rng rng(2024);
  int checked = 0;
  while (checked < 60) {
    const int side_k = rng.between(1, 4);
    const int stride = rng.between(1, 3);
    const int side_in = rng.between(side_k, 12);
    if ((side_in - side_k) % stride != 0) continue;
    const HexTensor in = random_tensor(rng, side_in, rng.between(1, 4));
    const FilterBank k = random_bank(rng, rng.between(1, 4), in.channels(), side_k);
    const HexTensor out = conv_valid(in, k, stride);
    const auto oracle = testing::oracle_conv(in, k, stride);
    EXPECT_LT(rel_error(out.values(), oracle), 1e-10);
    EXPECT_LT(rel_error(out.values(), zeroout_conv(in, k, stride).values()), 1e-10);
    ++checked;
  }
}

TEST(ConvValid, IsLinearWithoutBias) {
  Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const HexTensor a = random_tensor(rng, 6, 2);
    const HexTensor b = random_tensor(rng, 6, 2);
    const FilterBank k = random_bank(rng, 3, 2, 2, false);
    const double alpha = rng.uniform(-2, 2);
    const double beta = rng.uniform(-2, 2);
    HexTensor mix = a;
    for (std::size_t i = 0; i < mix.size(); ++i) {
      mix.values()[i] = alpha * a.values()[i] + beta * b.values()[i];
    }
    const HexTensor lhs = conv_valid(mix, k, 2);
    const HexTensor ca = conv_valid(a, k, 2);
    const HexTensor cb = conv_valid(b, k, 2);
    std::vector<double> rhs(lhs.size());
    for (std::size_t i = 0; i < rhs.size(); ++i) {
      rhs[i] = alpha * ca.values()[i] + beta * cb.values()[i];
    }
    EXPECT_LT(rel_error(lhs.values(), rhs), 1e-12);
  }
}

TEST(ConvValid, MacCountIsExact) {
  Rng rng(9);
  for (int side_k : {1, 2, 3, 4}) {
    const HexTensor in = random_tensor(rng, 9, 3);
    const FilterBank k = random_bank(rng, 2, 3, side_k);
    const MacScope scope;
    const HexTensor out = conv_valid(in, k, 1);
    EXPECT_EQ(scope.elapsed(), out.cells_per_channel() * 2 * 3 * cell_count(side_k));
  }
}

TEST(ConvValid, MacsPerOutputAgainstZeroOut) {
  Rng rng(10);
  for (int side_k : {2, 3}) {
    const HexTensor in = random_tensor(rng, 8, 2);
    const FilterBank k = random_bank(rng, 2, 2, side_k);
    MacScope hex_scope;
    const HexTensor hex = conv_valid(in, k, 1);
    const std::uint64_t hex_macs = hex_scope.elapsed();
    MacScope rect_scope;
    const RectTensor rect = rect_conv_reference(embed_parallelogram(in), zeroout_filter(k), 1);
    const std::uint64_t rect_macs = rect_scope.elapsed();
    const std::uint64_t hex_outputs = hex.size();
    const std::uint64_t rect_outputs = rect.data.size();
    const std::uint64_t ek = cell_count(side_k);
    const std::uint64_t rk = static_cast<std::uint64_t>((2 * side_k - 1) * (2 * side_k - 1));
    // (hex_macs / hex_outputs) / (rect_macs / rect_outputs) == ek / rk, exactly.
    EXPECT_EQ(hex_macs * rect_outputs * rk, rect_macs * hex_outputs * ek);
  }
}

TEST(ConvValid, RejectsBadGeometry) {
  Rng rng(1);
  const HexTensor in = random_tensor(rng, 5, 2);
  EXPECT_THROW(conv_valid(in, random_bank(rng, 1, 3, 2), 1), ShapeError);
  EXPECT_THROW(conv_valid(in, random_bank(rng, 1, 2, 2), 2), GeometryError);
  EXPECT_THROW(conv_valid(in, random_bank(rng, 1, 2, 6), 1), GeometryError);
  EXPECT_THROW(conv_valid(in, random_bank(rng, 1, 2, 2), 0), GeometryError);
  // Floor rounding accepts a stride that does not tile.
  EXPECT_EQ(conv_valid(in, random_bank(rng, 1, 2, 2), 2, StrideRounding::floor).side(), 2);
}

TEST(ConvGeometry, OutputSides) {
  EXPECT_EQ(ConvGeometry::valid(5, 2, 3).output_side, 2);
  EXPECT_EQ(ConvGeometry::valid(8, 2, 1).output_side, 7);
  EXPECT_EQ(ConvGeometry::valid(16, 2, 3, StrideRounding::floor).output_side, 5);
  EXPECT_EQ(ConvGeometry::full(3, 2).output_side, 4);
  EXPECT_THROW(ConvGeometry::valid(16, 2, 3), GeometryError);
}

TEST(ConvFull, UnitFilterScales) {
  Rng rng(3);
  const HexTensor in = random_tensor(rng, 4, 2);
  FilterBank k(1, 2, 1, {2.0, -1.0});
  const HexTensor full = conv_full(in, k);
  const HexTensor valid = conv_valid(in, k, 1);
  EXPECT_EQ(full, valid);
  for (std::size_t p = 0; p < full.cells_per_channel(); ++p) {
    EXPECT_DOUBLE_EQ(full.values()[p], 2.0 * in.channel(0)[p] - in.channel(1)[p]);
  }
}

TEST(ConvFull, SingleCellInputSpreadsOverFilter) {
  const HexTensor in(HexShape(1), 1, {3.25});
  FilterBank k(1, 1, 2, std::vector<double>(7, 1.0));
  const HexTensor out = conv_full(in, k);
  ASSERT_EQ(out.side(), 2);
  for (double v : out.values()) EXPECT_EQ(v, 3.25);
}

TEST(ConvFull, MatchesZeroOutFullConvolution) {
  Rng rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const HexTensor in = random_tensor(rng, 3, 2);
    const FilterBank k = random_bank(rng, 2, 2, 2);
    const HexTensor ours = conv_full(in, k);
    const HexTensor ref = zeroout_conv(in, k, 1, ConvMode::full);
    ASSERT_EQ(ours.side(), 4);
    EXPECT_LT(rel_error(ours.values(), ref.values()), 1e-12);
  }
}

TEST(ConvFull, CentralRegionIsValidConvolution) {
  Rng rng(13);
  for (int side_k = 1; side_k <= 3; ++side_k) {
    const HexTensor in = random_tensor(rng, 6, 2);
    const FilterBank k = random_bank(rng, 2, 2, side_k);
    const HexTensor full = conv_full(in, k);
    const HexTensor valid = conv_valid(in, k, 1);
    const int shift = 2 * (side_k - 1);
    for (int f = 0; f < 2; ++f) {
      valid.shape().for_each_cell([&](std::size_t off, AxialIndex p) {
        EXPECT_NEAR(full.at(f, {p.u + shift, p.v + shift}), valid.channel(f)[off], 1e-12);
      });
    }
  }
}

TEST(MaxPool, ConstantInputPicksAnchor) {
  const HexTensor in(HexShape(5), 1, std::vector<double>(61, 0.5));
  const auto res = maxpool(in, 2, 3);
  for (double v : res.output.values()) EXPECT_EQ(v, 0.5);
  res.output.shape().for_each_cell([&](std::size_t off, AxialIndex p) {
    EXPECT_EQ(res.argmax.winner(0, off), in.shape().offset({3 * p.u, 3 * p.v}));
  });
}

TEST(MaxPool, OffsetValuedSideFiveMatchesFrozenOracle) {
  // Frozen from tests/oracles/hex_oracle.py: max offset inside each of the 7 patches.
  const std::vector<double> expected = {13, 16, 36, 39, 42, 57, 60};
  const HexTensor in = iota_tensor(5, 0.0);
  const auto res = maxpool(in, 2, 3);
  EXPECT_EQ(std::vector<double>(res.output.values().begin(), res.output.values().end()),
            expected);
  for (std::size_t p = 0; p < expected.size(); ++p) {
    EXPECT_EQ(res.argmax.winner(0, p), static_cast<std::uint32_t>(expected[p]));
  }
}

TEST(MaxPool, SingleWindowIsGlobalMax) {
  Rng rng(4);
  const HexTensor in = random_tensor(rng, 4, 2);
  const auto res = maxpool(in, 4, 1);
  for (int c = 0; c < 2; ++c) {
    auto ch = in.channel(c);
    EXPECT_EQ(res.output.channel(c)[0], *std::max_element(ch.begin(), ch.end()));
  }
}

TEST(MaxPool, TiesGoToSmallestOffset) {
  HexTensor in(HexShape(2), 1);
  in.channel(0)[2] = 1.0;
  in.channel(0)[5] = 1.0;
  const auto res = maxpool(in, 2, 1);
  EXPECT_EQ(res.argmax.winner(0, 0), 2u);
}

TEST(MaxPool, PermutationInvariantWithinWindow) {
  Rng rng(15);
  HexTensor in = random_tensor(rng, 2, 1);
  const double before = maxpool(in, 2, 1).output.values()[0];
  std::reverse(in.values().begin(), in.values().end());
  EXPECT_EQ(maxpool(in, 2, 1).output.values()[0], before);
}

TEST(AvgPool, ConstantAndSpike) {
  const HexTensor c(HexShape(5), 2, std::vector<double>(122, -1.5));
  const HexTensor pooled = avgpool(c, 2, 3);
  for (double v : pooled.values()) EXPECT_EQ(v, -1.5);
  HexTensor spike(HexShape(2), 1);
  spike.channel(0)[6] = 7.0;
  EXPECT_EQ(avgpool(spike, 2, 1).values()[0], 1.0);
}

TEST(AvgPool, RandomPatchesMatchEnumeration) {
  Rng rng(16);
  const HexTensor in = random_tensor(rng, 5, 2);
  const HexTensor out = avgpool(in, 2, 3);
  for (int c = 0; c < 2; ++c) {
    const auto img = testing::as_map(5, in.channel(c).data());
    std::size_t p = 0;
    for (const auto& anchor : oracle_cells(2)) {
      double sum = 0.0;
      for (const auto& d : oracle_cells(2)) {
        sum += img.at({3 * anchor.first + d.first, 3 * anchor.second + d.second});
      }
      EXPECT_NEAR(out.channel(c)[p++], sum / 7.0, 1e-15);
    }
  }
  EXPECT_THROW(avgpool(in, 2, 2), GeometryError);
}

TEST(FilterBank, ValidatesSizes) {
  EXPECT_THROW(FilterBank(2, 1, 2, std::vector<double>(13)), ShapeError);
  EXPECT_THROW(FilterBank(2, 1, 2, std::vector<double>(14), {1.0}), ShapeError);
  const FilterBank k(2, 3, 2);
  EXPECT_EQ(k.weights().size(), 2u * 3u * 7u);
}

TEST(FilterBank, TransposeReflect) {
  Rng rng(17);
  const FilterBank k = random_bank(rng, 2, 3, 2);
  const FilterBank t = transpose_reflect(k);
  EXPECT_EQ(t.filters(), 3);
  EXPECT_EQ(t.in_channels(), 2);
  for (int f = 0; f < 2; ++f) {
    for (int c = 0; c < 3; ++c) {
      k.shape().for_each_cell([&](std::size_t off, AxialIndex idx) {
        EXPECT_EQ(t.filter(c, f)[k.shape().offset(k.shape().reflect(idx))], k.filter(f, c)[off]);
      });
    }
  }
}

}  // namespace
}  // namespace hexcnn
