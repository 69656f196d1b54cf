// Acceptance checks: one PASS/FAIL line per primary criterion. Tolerances and
// time budgets are fixed below. Exit status is the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "hexcnn/counters.hpp"
#include "hexcnn/hexgrad.hpp"
#include "hexcnn/im2col.hpp"
#include "hexcnn/nn.hpp"
#include "hexcnn/space.hpp"
#include "hexcnn/zeroout.hpp"
#include "test_support.hpp"

namespace {

using namespace hexcnn;
using hexcnn::testing::random_bank;
using hexcnn::testing::random_tensor;
using hexcnn::testing::rel_error;
using Clock = std::chrono::steady_clock;

constexpr double kSpaceTolPp = 0.1;
constexpr double kQuasiHTolPp = 0.5;
constexpr double kOracleTol = 1e-10;
constexpr double kGradTol = 1e-5;
constexpr double kFdStep = 1e-6;
constexpr double kAdjointTol = 1e-10;
constexpr double kTrajectoryTol = 1e-8;
constexpr double kLossDropFraction = 0.5;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double budget_s, const std::function<Outcome()>& fn) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
  const bool in_budget = elapsed < budget_s;
  const bool pass = o.pass && in_budget;
  if (!pass) ++failures;
  std::printf("%s [%d] %s: %s; %.3f s (budget %.0f s%s)\n", pass ? "PASS" : "FAIL", id, name,
              o.detail.c_str(), elapsed, budget_s, in_budget ? "" : ", exceeded");
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

// Directional central difference of `loss` along a random direction over the
// values in `x`, compared with <analytic, direction>.
double directional_probe(Rng& rng, std::span<double> x, std::span<const double> analytic,
                         const std::function<double()>& loss) {
  std::vector<double> dir(x.size());
  for (double& d : dir) d = rng.uniform(-1.0, 1.0);
  const std::vector<double> saved(x.begin(), x.end());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = saved[i] + kFdStep * dir[i];
  const double plus = loss();
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = saved[i] - kFdStep * dir[i];
  const double minus = loss();
  std::copy(saved.begin(), saved.end(), x.begin());
  return hexcnn::testing::probe_rel_error(dot(analytic, dir), (plus - minus) / (2 * kFdStep));
}

struct Geometry {
  int side_in;
  int side_k;
  int stride;
};

Geometry random_geometry(Rng& rng, int max_side) {
  Geometry g;
  g.side_k = rng.between(1, std::min(4, max_side));
  g.stride = rng.between(1, 3);
  g.side_in = g.side_k + g.stride * rng.between(0, (max_side - g.side_k) / g.stride);
  return g;
}

Outcome space_input() {
  const double s = space_row(120).input_saving_vs_zeroout;
  return {std::abs(s - 25.0) <= kSpaceTolPp,
          fmt("x=120 saving %.3f%% vs ZeroOut (target 25.0 +- %.1f pp)", s, kSpaceTolPp)};
}

Outcome space_conv() {
  const double s = space_row(120).conv_saving_vs_zeroout;
  return {std::abs(s - 41.7) <= kSpaceTolPp,
          fmt("x=120 L_k=2 s=1 saving %.3f%% vs ZeroOut (target 41.7 +- %.1f pp)", s, kSpaceTolPp)};
}

Outcome space_quasih() {
  const double s = space_row(120).input_saving_vs_quasih;
  return {std::abs(s - 13.8) <= kQuasiHTolPp,
          fmt("x=120 saving %.3f%% vs Quasi-H (target 13.8 +- %.1f pp)", s, kQuasiHTolPp)};
}

Outcome patch_reproduction() {
  Rng rng(4);
  const std::size_t p = patch_count(5, 2, 3);
  const auto m = im2col(random_tensor(rng, 5, 3), 2, 3);
  const bool ok = p == 7 && m.rows() == 7 && m.cols() == 21;
  return {ok, fmt("patches %.0f, im2col %.0fx%.0f (target 7, 7x21)", static_cast<double>(p),
                  static_cast<double>(m.rows()), static_cast<double>(m.cols()))};
}

Outcome oracle_equivalence() {
  Rng rng(20240501);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const Geometry g = random_geometry(rng, 12);
    const HexTensor in = random_tensor(rng, g.side_in, rng.between(1, 4));
    const FilterBank k = random_bank(rng, rng.between(1, 4), in.channels(), g.side_k);
    const HexTensor direct = conv_valid(in, k, g.stride);
    const HexTensor zo = zeroout_conv(in, k, g.stride);
    const HexTensor mm = conv_gemm(in, k, g.stride);
    const auto coords = hexcnn::testing::oracle_conv(in, k, g.stride);
    worst = std::max({worst, rel_error(direct.values(), zo.values()),
                      rel_error(mm.values(), zo.values()), rel_error(direct.values(), coords)});
  }
  return {worst <= kOracleTol,
          fmt("200 cases, worst relative error %.3g (tolerance %.0g)", worst, kOracleTol)};
}

Outcome gradient_correctness() {
  Rng rng(77);
  constexpr int kProbes = 50;
  std::vector<std::pair<std::string, double>> worst;
  const auto record = [&](const std::string& op, double e) {
    for (auto& w : worst) {
      if (w.first == op) {
        w.second = std::max(w.second, e);
        return;
      }
    }
    worst.emplace_back(op, e);
  };
  const auto half_sq = [](const HexTensor& t) { return 0.5 * dot(t.values(), t.values()); };

  for (int p = 0; p < kProbes; ++p) {
    const Geometry g = random_geometry(rng, 8);
    HexTensor x = random_tensor(rng, g.side_in, rng.between(1, 3));
    FilterBank k = random_bank(rng, rng.between(1, 3), x.channels(), g.side_k);
    const auto conv_loss = [&] { return half_sq(conv_valid(x, k, g.stride)); };
    const HexTensor delta = conv_valid(x, k, g.stride);
    const HexTensor gx = conv_backward_input(delta, k, g.stride, g.side_in);
    const auto gk = conv_backward_filter(x, delta, g.side_k, g.stride);
    record("conv input", directional_probe(rng, x.values(), gx.values(), conv_loss));
    record("conv weights", directional_probe(rng, k.weights(), gk.weights, conv_loss));
    record("conv bias", directional_probe(rng, k.bias(), gk.bias, conv_loss));

    const int pool_side = rng.between(1, 3);
    const int pool_stride = rng.between(1, 3);
    HexTensor px = random_tensor(rng, rng.between(pool_side, 8), 2);
    const auto rounding = StrideRounding::floor;
    const auto mp = maxpool(px, pool_side, pool_stride, rounding);
    const HexTensor gmp = maxpool_backward(mp.output, mp.argmax, px.side());
    record("maxpool", directional_probe(rng, px.values(), gmp.values(), [&] {
             return half_sq(maxpool(px, pool_side, pool_stride, rounding).output);
           }));
    const HexTensor ap = avgpool(px, pool_side, pool_stride, rounding);
    const HexTensor gap = avgpool_backward(ap, pool_side, pool_stride, px.side());
    record("avgpool", directional_probe(rng, px.values(), gap.values(), [&] {
             return half_sq(avgpool(px, pool_side, pool_stride, rounding));
           }));

    HexTensor pre = random_tensor(rng, rng.between(1, 8), 2);
    const HexTensor act = apply_activation(pre, Activation::relu);
    const HexTensor gact = apply_activation_backward(act, pre, Activation::relu);
    record("relu", directional_probe(rng, pre.values(), gact.values(), [&] {
             return half_sq(apply_activation(pre, Activation::relu));
           }));
  }

  // Composed network: conv -> maxpool -> flatten -> dense -> dense -> softmax cross-entropy.
  nn::NetworkConfig cfg;
  cfg.input_side = 5;
  cfg.input_channels = 2;
  cfg.seed = 3;
  cfg.layers = {nn::LayerSpec::conv(3, 2, 1, Activation::relu), nn::LayerSpec::maxpool(2, 2),
                nn::LayerSpec::flatten(), nn::LayerSpec::dense(6, Activation::relu),
                nn::LayerSpec::dense(3, Activation::identity), nn::LayerSpec::softmax_xent()};
  nn::Network net = nn::build_network(cfg);
  std::vector<HexTensor> batch = {random_tensor(rng, 5, 2), random_tensor(rng, 5, 2)};
  const std::vector<int> labels = {1, 2};
  const nn::Gradients grads = nn::backward(net, nn::forward(net, batch), labels);
  std::vector<double> flat_grad;
  for (const auto& b : grads.blocks) flat_grad.insert(flat_grad.end(), b.begin(), b.end());
  const auto net_loss = [&] {
    const auto fwd = nn::forward(net, batch);
    return 0.5 * (nn::cross_entropy(fwd.logits[0], 1) + nn::cross_entropy(fwd.logits[1], 2));
  };
  for (int p = 0; p < kProbes; ++p) {
    std::vector<double> params = net.flat_parameters();
    std::vector<double> dir(params.size());
    for (double& d : dir) d = rng.uniform(-1.0, 1.0);
    std::vector<double> moved = params;
    for (std::size_t i = 0; i < params.size(); ++i) moved[i] = params[i] + kFdStep * dir[i];
    net.set_flat_parameters(moved);
    const double plus = net_loss();
    for (std::size_t i = 0; i < params.size(); ++i) moved[i] = params[i] - kFdStep * dir[i];
    net.set_flat_parameters(moved);
    const double minus = net_loss();
    net.set_flat_parameters(params);
    record("3-layer network", hexcnn::testing::probe_rel_error(
                                  dot(flat_grad, dir), (plus - minus) / (2 * kFdStep)));
  }

  bool ok = true;
  std::string detail = "50 directional probes per op, h=1e-6, worst:";
  for (const auto& [op, e] : worst) {
    ok = ok && e <= kGradTol;
    char buf[96];
    std::snprintf(buf, sizeof buf, " %s %.2g;", op.c_str(), e);
    detail += buf;
  }
  detail += fmt(" tolerance %.0g", kGradTol);
  return {ok, detail};
}

Outcome adjoint_identity() {
  Rng rng(99);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Geometry g = random_geometry(rng, 12);
    const HexTensor x = random_tensor(rng, g.side_in, rng.between(1, 4));
    const FilterBank k = random_bank(rng, rng.between(1, 4), x.channels(), g.side_k, false);
    const HexTensor y = conv_valid(x, k, g.stride);
    const HexTensor d = random_tensor(rng, y.side(), y.channels());
    const HexTensor back = conv_backward_input(d, k, g.stride, g.side_in);
    const double lhs = dot(y.values(), d.values());
    const double rhs = dot(x.values(), back.values());
    worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
  }
  return {worst <= kAdjointTol,
          fmt("100 cases, worst |<conv(I,K),D> - <I,back(D)>| / max(1,|lhs|) = %.3g (tolerance "
              "%.0g)",
              worst, kAdjointTol)};
}

Outcome mac_ratio() {
  Rng rng(5);
  bool ok = true;
  std::string detail;
  for (int side_k : {2, 3}) {
    const std::uint64_t ek = cell_count(side_k);
    const std::uint64_t rk = static_cast<std::uint64_t>((2 * side_k - 1) * (2 * side_k - 1));
    for (int side_in : {side_k, 9, 16}) {
      const HexTensor in = random_tensor(rng, side_in, 2);
      const FilterBank k = random_bank(rng, 3, 2, side_k);
      const MacScope hs;
      const std::uint64_t hex_out = conv_valid(in, k, 1).size();
      const std::uint64_t hex_macs = hs.elapsed();
      const MacScope zs;
      const std::uint64_t zo_out =
          rect_conv_reference(embed_parallelogram(in), zeroout_filter(k), 1).data.size();
      const std::uint64_t zo_macs = zs.elapsed();
      ok = ok && hex_macs * zo_out * rk == zo_macs * hex_out * ek;
    }
    const std::uint64_t g = std::gcd(ek, rk);
    detail += fmt("L_k=%.0f ratio %.0f/%.0f; ", side_k, static_cast<double>(ek / g),
                  static_cast<double>(rk / g));
  }
  return {ok, detail + "MACs per output cell, exact integer comparison"};
}

io::Dataset smoke_dataset(int side, int count) {
  Rng rng(1234);
  io::Dataset ds;
  const int mid = side - 1;
  for (int i = 0; i < count; ++i) {
    const int label = i % 2;
    HexTensor t(HexShape(side), 1);
    t.shape().for_each_cell([&](std::size_t off, AxialIndex p) {
      // Class 0: bright upper half; class 1: bright lower half.
      const double signal = (p.u < mid) == (label == 0) ? 1.0 : 0.0;
      t.values()[off] = signal + rng.uniform(-0.5, 0.5);
    });
    ds.samples.push_back(std::move(t));
    ds.labels.push_back(label);
  }
  return ds;
}

double dataset_loss(const nn::Network& net, const io::Dataset& ds) {
  const auto fwd = nn::forward(net, ds.samples);
  double loss = 0.0;
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    loss += nn::cross_entropy(fwd.logits[i], ds.labels[i]);
  }
  return loss / static_cast<double>(ds.samples.size());
}

Outcome training_smoke() {
  constexpr int kSide = 17;
  const io::Dataset ds = smoke_dataset(kSide, 200);
  const nn::TrainConfig tc{0.1, 8, 50, 42};
  nn::NetworkConfig cfg = nn::hex_lenet(kSide, 2);
  cfg.seed = 42;
  nn::Network hex = nn::build_network(cfg);
  nn::Network ref = nn::build_network(cfg);
  ref.set_backend(nn::Backend::zeroout);
  const double before = dataset_loss(hex, ds);
  const std::vector<double> a = nn::train(hex, ds, tc);
  const std::vector<double> b = nn::train(ref, ds, tc);
  const double after = dataset_loss(hex, ds);
  double traj = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    traj = std::max(traj, std::abs(a[i] - b[i]) / std::max(std::abs(b[i]), 1e-300));
  }
  const double drop = 1.0 - after / before;
  const bool ok = drop >= kLossDropFraction && traj <= kTrajectoryTol;
  return {ok, fmt("hex-LeNet side 17, 200 samples, batch 8, lr 0.1, 50 steps: dataset loss "
                  "%.4f -> %.4f (drop %.1f%%, need >= 50%%); hex vs ZeroOut trajectory max rel "
                  "diff %.3g (tolerance 1e-8)",
                  before, after, 100.0 * drop, traj)};
}

double median_seconds(const std::function<void()>& fn, int reps) {
  fn();
  std::vector<double> t;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = Clock::now();
    fn();
    t.push_back(std::chrono::duration<double>(Clock::now() - t0).count());
  }
  std::sort(t.begin(), t.end());
  return t[t.size() / 2];
}

Outcome timing_direction() {
  Rng rng(6);
  bool ok = true;
  std::string detail = "median of 5 after warm-up, C=3 F=8 L_k=2:";
  for (int side : {64, 128, 256}) {
    const HexTensor in = random_tensor(rng, side, 3);
    const FilterBank k = random_bank(rng, 8, 3, 2);
    const double hex = median_seconds([&] { (void)conv_valid(in, k, 1); }, 5);
    const double zo = median_seconds([&] { (void)zeroout_conv(in, k, 1); }, 5);
    ok = ok && hex < zo;
    detail += fmt(" L_I=%.0f hex %.4f s vs zeroout %.4f s", side, hex, zo);
    if (side != 256) detail += ";";
  }
  return {ok, detail};
}

}  // namespace

int main() {
  criterion(1, "input-space saving vs ZeroOut", 1, space_input);
  criterion(2, "convolution-space saving vs ZeroOut", 1, space_conv);
  criterion(3, "input-space saving vs Quasi-H", 1, space_quasih);
  criterion(4, "patch count and im2col shape", 1, patch_reproduction);
  criterion(5, "oracle equivalence (direct == ZeroOut == GEMM)", 30, oracle_equivalence);
  criterion(6, "gradient correctness vs finite differences", 60, gradient_correctness);
  criterion(7, "adjoint identity", 10, adjoint_identity);
  criterion(8, "MAC-count ratio", 5, mac_ratio);
  criterion(9, "training smoke", 300, training_smoke);
  criterion(10, "hex_direct faster than zeroout_ref", 120, timing_direction);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
