#include <benchmark/benchmark.h>

#include "hexcnn/counters.hpp"
#include "hexcnn/hexgrad.hpp"
#include "hexcnn/im2col.hpp"
#include "hexcnn/random.hpp"
#include "hexcnn/zeroout.hpp"

namespace {

using namespace hexcnn;

constexpr int kChannels = 3;
constexpr int kFilters = 8;

struct ConvCase {
  HexTensor input;
  FilterBank bank{1, 1, 1};
};

ConvCase make_case(int side, int filter_side) {
  Rng rng(static_cast<std::uint64_t>(side * 31 + filter_side));
  ConvCase c{HexTensor(HexShape(side), kChannels), FilterBank(kFilters, kChannels, filter_side)};
  for (double& v : c.input.values()) v = rng.uniform(-1, 1);
  for (double& v : c.bank.weights()) v = rng.uniform(-1, 1);
  return c;
}

template <class Fn>
void run_conv(benchmark::State& state, Fn&& fn) {
  const ConvCase c = make_case(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const MacScope scope;
  for (auto _ : state) benchmark::DoNotOptimize(fn(c));
  state.counters["MACs/iter"] = benchmark::Counter(
      static_cast<double>(scope.elapsed()) / static_cast<double>(state.iterations()));
  state.counters["MAC/s"] =
      benchmark::Counter(static_cast<double>(scope.elapsed()), benchmark::Counter::kIsRate);
}

void BM_HexDirect(benchmark::State& state) {
  run_conv(state, [](const ConvCase& c) { return conv_valid(c.input, c.bank, 1); });
}

void BM_HexGemm(benchmark::State& state) {
  run_conv(state, [](const ConvCase& c) { return conv_gemm(c.input, c.bank, 1); });
}

void BM_ZeroOutRef(benchmark::State& state) {
  run_conv(state, [](const ConvCase& c) { return zeroout_conv(c.input, c.bank, 1); });
}

void BM_HexBackwardInput(benchmark::State& state) {
  const ConvCase c = make_case(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const HexTensor delta = conv_valid(c.input, c.bank, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(conv_backward_input(delta, c.bank, 1, c.input.side()));
  }
}

void BM_HexBackwardFilter(benchmark::State& state) {
  const ConvCase c = make_case(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const HexTensor delta = conv_valid(c.input, c.bank, 1);
  const int k = c.bank.side();
  for (auto _ : state) benchmark::DoNotOptimize(conv_backward_filter(c.input, delta, k, 1));
}

void conv_args(benchmark::internal::Benchmark* b) {
  for (int side : {64, 128, 256}) {
    for (int k : {2, 3}) b->Args({side, k});
  }
}

BENCHMARK(BM_HexDirect)->Apply(conv_args)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HexGemm)->Apply(conv_args)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ZeroOutRef)->Apply(conv_args)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HexBackwardInput)->Args({128, 2})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HexBackwardFilter)->Args({128, 2})->Unit(benchmark::kMillisecond);

void BM_Gemm(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(n);
  DenseMatrix<double> a(n, n);
  DenseMatrix<double> b(n, n);
  for (double& v : a.values()) v = rng.uniform(-1, 1);
  for (double& v : b.values()) v = rng.uniform(-1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(gemm(a, b));
  state.counters["FLOP/s"] = benchmark::Counter(2.0 * static_cast<double>(n * n * n),
                                                benchmark::Counter::kIsIterationInvariantRate);
}

BENCHMARK(BM_Gemm)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
