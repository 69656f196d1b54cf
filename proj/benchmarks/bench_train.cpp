#include <benchmark/benchmark.h>

#include "hexcnn/nn.hpp"
#include "hexcnn/random.hpp"

namespace {

using namespace hexcnn;

void run_step(benchmark::State& state, nn::Backend backend) {
  const int side = static_cast<int>(state.range(0));
  const int batch_size = static_cast<int>(state.range(1));
  nn::NetworkConfig cfg = nn::hex_lenet5(side, 10);
  nn::Network net = nn::build_network(cfg);
  net.set_backend(backend);
  Rng rng(5);
  std::vector<HexTensor> batch;
  std::vector<int> labels;
  for (int i = 0; i < batch_size; ++i) {
    HexTensor t(HexShape(side), 1);
    for (double& v : t.values()) v = rng.uniform(-1, 1);
    batch.push_back(std::move(t));
    labels.push_back(i % 10);
  }
  const nn::TrainConfig tc{0.01, batch_size, 1, 1};
  for (auto _ : state) benchmark::DoNotOptimize(nn::train_step(net, batch, labels, tc));
}

void BM_TrainStepHex(benchmark::State& state) { run_step(state, nn::Backend::hex); }
void BM_TrainStepZeroOut(benchmark::State& state) { run_step(state, nn::Backend::zeroout); }

BENCHMARK(BM_TrainStepHex)->Args({37, 8})->Args({64, 8})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrainStepZeroOut)->Args({37, 8})->Args({64, 8})->Unit(benchmark::kMillisecond);

}  // namespace
