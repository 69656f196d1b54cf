#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

#include "hexcnn/hexgrid.hpp"

namespace hexcnn::detail {

// A hexagonal window anchored at input cell (a_u, a_v) covers, for every
// window column j, a contiguous run of input storage: rows
// a_u + col_min(j) .. a_u + col_max(j) of input column a_v + j.  Visiting runs
// in column order and each run top to bottom reproduces the window's own
// storage order.
class WindowRuns {
 public:
  struct Run {
    int row_begin;
    int length;
  };

  explicit WindowRuns(const HexShape& window) : window_(window) {
    runs_.reserve(static_cast<std::size_t>(window.extent()));
    for (int j = 0; j < window.extent(); ++j) runs_.push_back({window.col_min(j), window.col_length(j)});
  }

  const HexShape& window() const noexcept { return window_; }
  int columns() const noexcept { return static_cast<int>(runs_.size()); }
  const Run& run(int j) const noexcept { return runs_[static_cast<std::size_t>(j)]; }

  // Input storage offset of the first cell of each run.
  void bases(const HexShape& input, int anchor_u, int anchor_v, std::size_t* out) const noexcept {
    for (int j = 0; j < columns(); ++j) {
      const Run& r = runs_[static_cast<std::size_t>(j)];
      // Minkowski-sum property: anchor + window cell always lands inside the input.
      assert(input.contains(anchor_u + r.row_begin, anchor_v + j));
      assert(input.contains(anchor_u + r.row_begin + r.length - 1, anchor_v + j));
      out[j] = input.offset_unchecked(anchor_u + r.row_begin, anchor_v + j);
    }
  }

 private:
  HexShape window_;
  std::vector<Run> runs_;
};

}  // namespace hexcnn::detail
