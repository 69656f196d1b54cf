#include <gtest/gtest.h>

#include <numeric>
#include <set>

#include "hexcnn/hexgrid.hpp"
#include "hexcnn/random.hpp"
#include "test_support.hpp"

namespace hexcnn {
namespace {

TEST(HexGrid, CellCount) {
  EXPECT_EQ(cell_count(1), 1u);
  EXPECT_EQ(cell_count(2), 7u);
  EXPECT_EQ(cell_count(5), 61u);
  EXPECT_THROW(cell_count(0), ShapeError);
  EXPECT_THROW(HexShape(-3), ShapeError);
}

TEST(HexGrid, RowBounds) {
  EXPECT_EQ(row_bounds(3, 0), (IndexRange{0, 2}));
  EXPECT_EQ(row_bounds(3, 2), (IndexRange{0, 4}));
  EXPECT_EQ(row_bounds(3, 4), (IndexRange{2, 4}));
  EXPECT_THROW(row_bounds(3, 5), ShapeError);
  EXPECT_THROW(row_bounds(3, -1), ShapeError);
}

TEST(HexGrid, ColBounds) {
  EXPECT_EQ(col_bounds(2, 0), (IndexRange{0, 1}));
  EXPECT_EQ(col_bounds(2, 1), (IndexRange{0, 2}));
  EXPECT_EQ(col_bounds(2, 2), (IndexRange{1, 2}));
  EXPECT_THROW(col_bounds(2, 3), ShapeError);
}

TEST(HexGrid, RowLengthProfileSumsToCellCount) {
  for (int side = 1; side <= 40; ++side) {
    std::size_t total = 0;
    for (int u = 0; u <= 2 * side - 2; ++u) {
      const int len = row_bounds(side, u).length();
      // L, L+1, ..., 2L-1, ..., L+1, L
      EXPECT_EQ(len, side + std::min(u, 2 * side - 2 - u)) << "side " << side << " row " << u;
      total += static_cast<std::size_t>(len);
    }
    EXPECT_EQ(total, cell_count(side));
  }
}

TEST(HexGrid, FlatOffsetExamples) {
  EXPECT_EQ(flat_offset(2, {0, 0}), 0u);
  EXPECT_EQ(flat_offset(2, {2, 1}), 4u);
  EXPECT_EQ(flat_offset(2, {2, 2}), 6u);
  EXPECT_THROW(flat_offset(2, {0, 2}), ShapeError);
  EXPECT_THROW(flat_offset(2, {2, 0}), ShapeError);
}

TEST(HexGrid, FlatOffsetIsStorageOrderBijection) {
  for (int side = 1; side <= 16; ++side) {
    const HexShape shape(side);
    const auto cells = testing::oracle_cells(side);
    ASSERT_EQ(cells.size(), shape.cell_count());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const AxialIndex idx{cells[i].first, cells[i].second};
      ASSERT_EQ(shape.offset(idx), i) << "side " << side;
      ASSERT_EQ(shape.index_at(i), idx);
    }
  }
}

TEST(HexGrid, PointReflectExamples) {
  EXPECT_EQ(point_reflect(2, {0, 0}), (AxialIndex{2, 2}));
  EXPECT_EQ(point_reflect(2, {1, 1}), (AxialIndex{1, 1}));
  EXPECT_EQ(point_reflect(3, {0, 2}), (AxialIndex{4, 2}));
  EXPECT_THROW(point_reflect(2, {0, 2}), ShapeError);
}

TEST(HexGrid, PointReflectMapsCellsOntoThemselves) {
  for (int side = 1; side <= 16; ++side) {
    const HexShape shape(side);
    std::set<std::size_t> seen;
    shape.for_each_cell([&](std::size_t, AxialIndex idx) {
      const AxialIndex r = shape.reflect(idx);
      ASSERT_TRUE(shape.contains(r));
      EXPECT_EQ(shape.reflect(r), idx);
      seen.insert(shape.offset(r));
    });
    EXPECT_EQ(seen.size(), shape.cell_count());
  }
}

TEST(HexTensor, RejectsMismatchedPayload) {
  EXPECT_THROW(HexTensor(HexShape(2), 1, std::vector<double>(6)), ShapeError);
  EXPECT_THROW(HexTensor(HexShape(2), 0), ShapeError);
  const HexTensor t(HexShape(3), 2, std::vector<double>(38, 1.0));
  EXPECT_EQ(t.size(), 38u);
  EXPECT_EQ(t.channel(1).size(), 19u);
}

TEST(PadRings, ZeroRingsIsIdentity) {
  Rng rng(1);
  const HexTensor t = testing::random_tensor(rng, 3, 2);
  EXPECT_EQ(pad_rings(t, 0), t);
  EXPECT_THROW(pad_rings(t, -1), ShapeError);
}

TEST(PadRings, OneRingAroundSideTwo) {
  const HexTensor ones(HexShape(2), 1, std::vector<double>(7, 1.0));
  const HexTensor padded = pad_rings(ones, 1);
  ASSERT_EQ(padded.side(), 3);
  int interior = 0;
  int ring = 0;
  padded.shape().for_each_cell([&](std::size_t off, AxialIndex idx) {
    const bool inside = HexShape(2).contains(idx.u - 1, idx.v - 1);
    const double v = padded.channel(0)[off];
    if (inside) {
      EXPECT_EQ(v, 1.0);
      ++interior;
    } else {
      EXPECT_EQ(v, 0.0);
      ++ring;
    }
  });
  EXPECT_EQ(interior, 7);
  EXPECT_EQ(ring, 12);
}

TEST(PadRings, SingleCellToCenter) {
  const HexTensor t(HexShape(1), 1, {4.5});
  const HexTensor padded = pad_rings(t, 2);
  ASSERT_EQ(padded.side(), 3);
  EXPECT_EQ(padded.at(0, {2, 2}), 4.5);
  EXPECT_EQ(std::accumulate(padded.values().begin(), padded.values().end(), 0.0), 4.5);
}

TEST(PadRings, PreservesSumAndMovesCells) {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int side = rng.between(1, 8);
    const int rings = rng.between(0, 4);
    const HexTensor t = testing::random_tensor(rng, side, rng.between(1, 3));
    const HexTensor p = pad_rings(t, rings);
    double before = 0.0;
    double after = 0.0;
    for (double v : t.values()) before += v;
    for (double v : p.values()) after += v;
    EXPECT_NEAR(before, after, 1e-12);
    for (int c = 0; c < t.channels(); ++c) {
      t.shape().for_each_cell([&](std::size_t off, AxialIndex idx) {
        EXPECT_EQ(p.at(c, {idx.u + rings, idx.v + rings}), t.channel(c)[off]);
      });
    }
  }
}

TEST(Rot180, ConstantFilterIsFixed) {
  const HexTensor k(HexShape(3), 1, std::vector<double>(19, 2.0));
  EXPECT_EQ(rot180_filter(k), k);
}

TEST(Rot180, MovesCornerToOppositeCorner) {
  HexTensor k(HexShape(2), 1);
  k.at(0, {0, 0}) = 1.0;
  const HexTensor r = rot180_filter(k);
  EXPECT_EQ(r.at(0, {2, 2}), 1.0);
  double sum = 0.0;
  for (double v : r.values()) sum += v;
  EXPECT_EQ(sum, 1.0);
}

TEST(Rot180, MatchesPointReflectionAndIsInvolution) {
  Rng rng(3);
  for (int side = 1; side <= 6; ++side) {
    const HexTensor k = testing::random_tensor(rng, side, 2);
    const HexTensor r = rot180_filter(k);
    for (int c = 0; c < 2; ++c) {
      k.shape().for_each_cell([&](std::size_t off, AxialIndex idx) {
        EXPECT_EQ(r.at(c, point_reflect(side, idx)), k.channel(c)[off]);
      });
    }
    EXPECT_EQ(rot180_filter(r), k);
  }
}

TEST(ResizeTopLeft, GrowThenShrinkRoundTrips) {
  Rng rng(11);
  const HexTensor t = testing::random_tensor(rng, 3, 2);
  const HexTensor grown = resize_top_left(t, 5);
  EXPECT_EQ(resize_top_left(grown, 3), t);
}

}  // namespace
}  // namespace hexcnn
