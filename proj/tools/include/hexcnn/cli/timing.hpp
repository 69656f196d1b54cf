#pragma once

#include <functional>
#include <vector>

namespace hexcnn::cli {

/// Runs fn once as a warm-up, then `reps` timed repetitions on the monotonic
/// clock. Returns the per-repetition seconds.
std::vector<double> time_repetitions(const std::function<void()>& fn, int reps);

double median(std::vector<double> values);

}  // namespace hexcnn::cli
