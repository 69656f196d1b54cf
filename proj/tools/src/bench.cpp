#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "hexcnn/cli/commands.hpp"
#include "hexcnn/cli/csv.hpp"
#include "hexcnn/cli/timing.hpp"
#include "hexcnn/counters.hpp"
#include "hexcnn/im2col.hpp"
#include "hexcnn/nn.hpp"
#include "hexcnn/parallel.hpp"
#include "hexcnn/random.hpp"
#include "hexcnn/space.hpp"
#include "hexcnn/zeroout.hpp"

namespace hexcnn::cli {
namespace {

const std::vector<std::string> kConvMethods = {"hex_direct", "hex_gemm", "zeroout_ref"};

std::string reduced_fraction(std::uint64_t num, std::uint64_t den) {
  const std::uint64_t g = std::gcd(num, den);
  if (g == 0) return "0/0";
  return fmt::format("{}/{}", num / g, den / g);
}

}  // namespace

int cmd_space_report(const SpaceOptions& opt, std::ostream& out, std::ostream& err) {
  for (int x : opt.sizes) {
    if (x < 1) {
      err << "error: sizes must be >= 1\n";
      return kUsage;
    }
  }
  const SpaceParams params{opt.channels, opt.filters, opt.filter_side, opt.stride};
  CsvWriter csv(out, {"side", "channels", "filters", "filter_side", "stride",
                      "hex_input_cells", "zeroout_input_cells", "quasih_input_cells",
                      "hex_patches", "zeroout_patches", "quasih_patches", "hex_im2col_cells",
                      "zeroout_im2col_cells", "quasih_im2col_cells", "hex_filter_cells",
                      "rect_filter_cells", "input_saving_vs_zeroout_pct",
                      "conv_saving_vs_zeroout_pct", "input_saving_vs_quasih_pct",
                      "conv_saving_vs_quasih_pct"});
  for (int x : opt.sizes) {
    SpaceRow r;
    try {
      r = space_row(x, params);
    } catch (const std::exception& e) {
      err << "skipping side " << x << ": " << e.what() << '\n';
      continue;
    }
    csv.row() << x << opt.channels << opt.filters << opt.filter_side << opt.stride << r.hex_input
              << r.zeroout_input << r.quasih_input << r.hex_patches << r.zeroout_patches
              << r.quasih_patches << r.hex_im2col << r.zeroout_im2col << r.quasih_im2col
              << r.hex_filters << r.rect_filters << r.input_saving_vs_zeroout
              << r.conv_saving_vs_zeroout << r.input_saving_vs_quasih << r.conv_saving_vs_quasih;
  }
  return kOk;
}

int cmd_bench_conv(const BenchConvOptions& opt, std::ostream& out, std::ostream& err) {
  if (opt.reps < 5) {
    err << "error: --reps must be >= 5\n";
    return kUsage;
  }
  if (opt.channels < 1 || opt.filters < 1) {
    err << "error: --channels and --filters must be >= 1\n";
    return kUsage;
  }
  std::vector<std::string> methods = opt.methods.empty() ? kConvMethods : opt.methods;
  for (const auto& m : methods) {
    if (std::find(kConvMethods.begin(), kConvMethods.end(), m) == kConvMethods.end()) {
      err << "error: unknown method '" << m << "'\n";
      return kUsage;
    }
  }
  CsvWriter csv(out, {"case", "method", "input_side", "filter_side", "stride", "channels",
                      "filters", "threads", "reps", "time_median_s", "time_min_s", "macs",
                      "output_cells", "mac_ratio_per_output_vs_zeroout", "input_bytes",
                      "im2col_bytes", "filter_bytes"});
  Rng rng(opt.seed);
  for (int side : opt.sizes) {
    ConvGeometry geo;
    try {
      geo = ConvGeometry::valid(side, opt.filter_side, opt.stride);
    } catch (const std::exception& e) {
      err << "skipping L_I=" << side << ": " << e.what() << '\n';
      continue;
    }
    HexTensor input(HexShape(side), opt.channels);
    for (double& v : input.values()) v = rng.uniform(-1.0, 1.0);
    FilterBank bank(opt.filters, opt.channels, opt.filter_side);
    for (double& v : bank.weights()) v = rng.uniform(-1.0, 1.0);
    const std::string case_id =
        fmt::format("L{}_k{}_s{}_c{}_f{}", side, opt.filter_side, opt.stride, opt.channels,
                    opt.filters);

    struct Measured {
      std::uint64_t macs = 0;
      std::uint64_t outputs = 0;
    };
    const auto count = [&](const std::string& m) {
      const MacScope scope;
      Measured r;
      if (m == "zeroout_ref") {
        const auto rect = rect_conv_reference(embed_parallelogram(input), zeroout_filter(bank),
                                              opt.stride);
        r.outputs = rect.data.size();
      } else {
        r.outputs = (m == "hex_gemm" ? conv_gemm(input, bank, opt.stride)
                                     : conv_valid(input, bank, opt.stride))
                        .size();
      }
      r.macs = scope.elapsed();
      return r;
    };
    const Measured zo = count("zeroout_ref");

    const std::int64_t ek = static_cast<std::int64_t>(cell_count(opt.filter_side));
    const std::int64_t rk = 2 * opt.filter_side - 1;
    const std::int64_t c = opt.channels;
    const std::int64_t f = opt.filters;
    const std::int64_t p_hex = static_cast<std::int64_t>(patch_count(side, opt.filter_side, opt.stride));
    const std::int64_t extent = 2 * side - 1;

    for (const auto& m : methods) {
      const Measured mm = count(m);
      std::function<void()> fn;
      if (m == "hex_direct") {
        fn = [&] { (void)conv_valid(input, bank, opt.stride); };
      } else if (m == "hex_gemm") {
        fn = [&] { (void)conv_gemm(input, bank, opt.stride); };
      } else {
        fn = [&] { (void)zeroout_conv(input, bank, opt.stride); };
      }
      const std::vector<double> times = time_repetitions(fn, opt.reps);
      const bool rect = m == "zeroout_ref";
      const std::int64_t input_bytes = 8 * (rect ? c * extent * extent : static_cast<std::int64_t>(input.size()));
      const std::int64_t im2col_bytes =
          m == "hex_gemm" ? 8 * p_hex * c * ek : 0;
      const std::int64_t filter_bytes = 8 * f * c * (rect ? rk * rk : ek);
      csv.row() << case_id << m << side << opt.filter_side << opt.stride << opt.channels
                << opt.filters << max_threads() << opt.reps << median(times)
                << *std::min_element(times.begin(), times.end()) << mm.macs << mm.outputs
                << reduced_fraction(mm.macs * zo.outputs, zo.macs * mm.outputs) << input_bytes
                << im2col_bytes << filter_bytes;
    }
  }
  return kOk;
}

namespace {

io::Dataset synthetic_dataset(int side, int classes, int count, std::uint64_t seed) {
  Rng rng(seed);
  io::Dataset ds;
  for (int i = 0; i < count; ++i) {
    const int label = i % classes;
    HexTensor t(HexShape(side), 1);
    t.shape().for_each_cell([&](std::size_t off, AxialIndex p) {
      const double pattern = std::sin(0.3 * (label + 1) * p.u) * std::cos(0.2 * (label + 1) * p.v);
      t.values()[off] = pattern + rng.uniform(-0.25, 0.25);
    });
    ds.samples.push_back(std::move(t));
    ds.labels.push_back(label);
  }
  return ds;
}

}  // namespace

int cmd_bench_train(const BenchTrainOptions& opt, std::ostream& out, std::ostream& err) {
  if (opt.reps < 5 || opt.steps < 1 || opt.batch < 1 || opt.learning_rate < 0.0) {
    err << "error: need --reps >= 5, --steps >= 1, --batch >= 1 and --lr >= 0\n";
    return kUsage;
  }
  nn::NetworkConfig cfg;
  try {
    if (opt.preset == "hexlenet4") {
      cfg = nn::hex_lenet4(opt.side, opt.classes);
    } else if (opt.preset == "hexlenet5") {
      cfg = nn::hex_lenet5(opt.side, opt.classes);
    } else if (opt.preset == "hexlenet") {
      cfg = nn::hex_lenet(opt.side, opt.classes);
    } else {
      err << "error: unknown preset '" << opt.preset << "' (hexlenet, hexlenet4, hexlenet5)\n";
      return kUsage;
    }
  } catch (const std::exception& e) {
    err << "error: preset " << opt.preset << " cannot be built at side " << opt.side << ": "
        << e.what() << '\n';
    return kUsage;
  }
  cfg.seed = opt.seed;
  const io::Dataset data = synthetic_dataset(opt.side, opt.classes, std::max(64, 4 * opt.batch),
                                             opt.seed + 1);
  const nn::TrainConfig tc{opt.learning_rate, opt.batch, opt.steps, opt.seed};

  struct PathResult {
    std::vector<double> losses;
    double median_batch_s = 0.0;
  };
  const auto run_path = [&](nn::Backend backend) {
    PathResult r;
    nn::Network probe = nn::build_network(cfg);
    probe.set_backend(backend);
    r.losses = nn::train(probe, data, tc);
    std::vector<double> per_batch;
    std::vector<HexTensor> batch(data.samples.begin(), data.samples.begin() + opt.batch);
    std::vector<int> labels(data.labels.begin(), data.labels.begin() + opt.batch);
    nn::Network net = nn::build_network(cfg);
    net.set_backend(backend);
    for (double t : time_repetitions([&] { nn::train_step(net, batch, labels, tc); }, opt.reps)) {
      per_batch.push_back(t);
    }
    r.median_batch_s = median(per_batch);
    return r;
  };
  const PathResult hex = run_path(nn::Backend::hex);
  const PathResult ref = run_path(nn::Backend::zeroout);

  double max_rel = 0.0;
  for (std::size_t i = 0; i < hex.losses.size(); ++i) {
    const double scale = std::max(std::abs(ref.losses[i]), 1e-300);
    max_rel = std::max(max_rel, std::abs(hex.losses[i] - ref.losses[i]) / scale);
  }
  const double saving = 100.0 * (1.0 - hex.median_batch_s / ref.median_batch_s);
  const std::size_t params = nn::build_network(cfg).parameter_count();

  CsvWriter csv(out, {"preset", "path", "side", "batch", "steps", "reps", "threads",
                      "parameters", "median_batch_s", "time_saving_vs_zeroout_pct",
                      "first_loss", "final_loss", "trajectory_max_rel_diff"});
  const auto emit = [&](const char* path, const PathResult& r) {
    csv.row() << opt.preset << path << opt.side << opt.batch << opt.steps << opt.reps
              << max_threads() << static_cast<std::uint64_t>(params) << r.median_batch_s
              << saving << r.losses.front() << r.losses.back() << max_rel;
  };
  emit("hexcnn", hex);
  emit("zeroout", ref);
  if (!(max_rel <= 1e-8)) {
    err << "FAIL: hexcnn and zeroout loss trajectories differ by " << max_rel << " relative\n";
    return kVerifyFailed;
  }
  return kOk;
}

}  // namespace hexcnn::cli
