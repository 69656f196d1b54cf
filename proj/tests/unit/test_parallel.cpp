#include <gtest/gtest.h>

#include <atomic>
#include <vector>

#include "hexcnn/parallel.hpp"

namespace hexcnn {
namespace {

TEST(ParallelFor, VisitsEveryIndexOnce) {
  for (int threads : {1, 2, 3, 8}) {
    ScopedThreads scope(threads);
    for (std::size_t n : {0u, 1u, 7u, 1000u}) {
      std::vector<std::atomic<int>> hits(n);
      parallel_for(n, 1, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) hits[i].fetch_add(1);
      });
      for (auto& h : hits) EXPECT_EQ(h.load(), 1);
    }
  }
}

TEST(ScopedThreads, RestoresCap) {
  const int before = max_threads();
  {
    ScopedThreads scope(3);
    EXPECT_EQ(max_threads(), 3);
  }
  EXPECT_EQ(max_threads(), before);
  EXPECT_GE(default_threads(), 1);
}

TEST(SetMaxThreads, ClampsToOne) {
  ScopedThreads scope(0);
  EXPECT_EQ(max_threads(), 1);
}

}  // namespace
}  // namespace hexcnn
