#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <numeric>
#include <ostream>

#include "hexcnn/cli/commands.hpp"
#include "hexcnn/cli/csv.hpp"
#include "hexcnn/hexgrad.hpp"
#include "hexcnn/im2col.hpp"
#include "hexcnn/io.hpp"
#include "hexcnn/random.hpp"
#include "hexcnn/zeroout.hpp"

namespace hexcnn::cli {
namespace {

struct CaseInputs {
  int input_side = 1;
  int filter_side = 1;
  int stride = 1;
  int channels = 1;
  int filters = 1;
  HexTensor input;
  FilterBank bank{1, 1, 1};
};

struct CaseResult {
  double error = 0.0;
  double tolerance = 0.0;
};

std::uint64_t case_seed(std::uint64_t seed, std::size_t suite, int index) {
  // splitmix64 of the three coordinates.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (suite * 1000003ull + static_cast<std::uint64_t>(index) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

HexTensor random_hex(Rng& rng, int side, int channels) {
  HexTensor t(HexShape(side), channels);
  for (double& v : t.values()) v = rng.uniform(-1.0, 1.0);
  return t;
}

CaseInputs draw_case(Rng& rng) {
  CaseInputs c;
  c.filter_side = rng.between(1, 4);
  c.stride = rng.between(1, 3);
  const int max_steps = (12 - c.filter_side) / c.stride;
  c.input_side = c.filter_side + c.stride * rng.between(0, max_steps);
  c.channels = rng.between(1, 4);
  c.filters = rng.between(1, 4);
  c.input = random_hex(rng, c.input_side, c.channels);
  c.bank = FilterBank(c.filters, c.channels, c.filter_side);
  for (double& v : c.bank.weights()) v = rng.uniform(-1.0, 1.0);
  for (double& v : c.bank.bias()) v = rng.uniform(-1.0, 1.0);
  return c;
}

double rel_error(std::span<const double> got, std::span<const double> ref) {
  double diff = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    diff = std::max(diff, std::abs(got[i] - ref[i]));
    scale = std::max(scale, std::abs(ref[i]));
  }
  return scale == 0.0 ? diff : diff / scale;
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

void corrupt(std::span<double> v) {
  if (!v.empty()) v[v.size() / 2] += 1.0;
}

using SuiteFn = std::function<CaseResult(Rng&, CaseInputs&, bool fault)>;

CaseResult conv_oracle(Rng&, CaseInputs& c, bool fault) {
  HexTensor got = conv_valid(c.input, c.bank, c.stride);
  if (fault) corrupt(got.values());
  const HexTensor ref = zeroout_conv(c.input, c.bank, c.stride);
  return {rel_error(got.values(), ref.values()), 1e-10};
}

CaseResult gemm_equivalence(Rng&, CaseInputs& c, bool fault) {
  HexTensor got = conv_gemm(c.input, c.bank, c.stride);
  if (fault) corrupt(got.values());
  const HexTensor ref = conv_valid(c.input, c.bank, c.stride);
  return {rel_error(got.values(), ref.values()), 1e-10};
}

CaseResult adjoint(Rng& rng, CaseInputs& c, bool fault) {
  std::fill(c.bank.bias().begin(), c.bank.bias().end(), 0.0);
  const HexTensor y = conv_valid(c.input, c.bank, c.stride);
  const HexTensor d = random_hex(rng, y.side(), y.channels());
  HexTensor g = conv_backward_input(d, c.bank, c.stride, c.input_side);
  if (fault) corrupt(g.values());
  const double lhs = dot(y.values(), d.values());
  const double rhs = dot(c.input.values(), g.values());
  return {std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)), 1e-10};
}

CaseResult gradient(Rng& rng, CaseInputs& c, bool fault) {
  // E = sum(O^2)/2. Each probe compares the analytic directional derivative
  // along a random direction with a central difference along it.
  const auto loss = [&] {
    const HexTensor y = conv_valid(c.input, c.bank, c.stride);
    return 0.5 * dot(y.values(), y.values());
  };
  const HexTensor delta = conv_valid(c.input, c.bank, c.stride);
  HexTensor gx = conv_backward_input(delta, c.bank, c.stride, c.input_side);
  FilterGradients<double> gk = conv_backward_filter(c.input, delta, c.filter_side, c.stride);
  if (fault) corrupt(gk.weights);
  constexpr double h = 1e-6;
  const auto probe = [&](std::span<double> x, std::span<const double> analytic) {
    std::vector<double> dir(x.size());
    for (double& d : dir) d = rng.uniform(-1.0, 1.0);
    const std::vector<double> saved(x.begin(), x.end());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = saved[i] + h * dir[i];
    const double plus = loss();
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = saved[i] - h * dir[i];
    const double minus = loss();
    std::copy(saved.begin(), saved.end(), x.begin());
    const double numeric = (plus - minus) / (2 * h);
    const double exact = dot(analytic, dir);
    return std::abs(exact - numeric) / std::max({std::abs(exact), std::abs(numeric), 1e-12});
  };
  const double worst = std::max({probe(c.input.values(), gx.values()),
                                 probe(c.bank.weights(), gk.weights),
                                 probe(c.bank.bias(), gk.bias)});
  return {worst, 1e-5};
}

CaseResult pooling(Rng&, CaseInputs& c, bool fault) {
  const int window = std::min(c.filter_side, c.input_side);
  auto hex = maxpool(c.input, window, c.stride, StrideRounding::floor);
  if (fault) corrupt(hex.output.values());
  const auto ref = zeroout::maxpool(c.input, window, c.stride, StrideRounding::floor);
  const HexTensor avg = avgpool(c.input, window, c.stride, StrideRounding::floor);
  const HexTensor avg_ref = zeroout::avgpool(c.input, window, c.stride, StrideRounding::floor);
  double err = std::max(rel_error(hex.output.values(), ref.output.values()),
                        rel_error(avg.values(), avg_ref.values()));
  if (hex.argmax.winners != ref.argmax.winners) err = std::max(err, 1.0);
  return {err, 1e-10};
}

const std::vector<std::pair<std::string, SuiteFn>>& suites() {
  static const std::vector<std::pair<std::string, SuiteFn>> s = {
      {"conv_oracle", conv_oracle}, {"gemm", gemm_equivalence}, {"adjoint", adjoint},
      {"gradient", gradient},       {"pooling", pooling},
  };
  return s;
}

void dump_case(const std::filesystem::path& dir, const std::string& name, const CaseInputs& c) {
  std::filesystem::create_directories(dir);
  io::save_hxt(dir / (name + "_input.hxt"), c.input);
  HexTensor filters(c.bank.shape(), c.filters * c.channels,
                    std::vector<double>(c.bank.weights().begin(), c.bank.weights().end()));
  io::save_hxt(dir / (name + "_filters.hxt"), filters);
}

}  // namespace

const std::vector<std::string>& verify_suites() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& s : suites()) n.push_back(s.first);
    return n;
  }();
  return names;
}

int cmd_verify(const VerifyOptions& opt, std::ostream& out, std::ostream& err) {
  if (opt.cases < 0) {
    err << "error: --cases must be >= 0\n";
    return kUsage;
  }
  for (const auto& s : opt.suites) {
    if (std::find(verify_suites().begin(), verify_suites().end(), s) == verify_suites().end()) {
      err << "error: unknown suite '" << s << "'\n";
      return kUsage;
    }
  }
  CsvWriter csv(out, {"suite", "case", "case_seed", "input_side", "filter_side", "stride",
                      "channels", "filters", "error", "tolerance", "status"});
  bool first_failure_reported = false;
  int failures = 0;
  for (std::size_t si = 0; si < suites().size(); ++si) {
    const auto& [name, fn] = suites()[si];
    if (!opt.suites.empty() &&
        std::find(opt.suites.begin(), opt.suites.end(), name) == opt.suites.end()) {
      continue;
    }
    for (int i = 0; i < opt.cases; ++i) {
      if (opt.only_case && *opt.only_case != i) continue;
      const std::uint64_t seed = case_seed(opt.seed, si, i);
      Rng rng(seed);
      CaseInputs c = draw_case(rng);
      const CaseInputs original = c;
      const bool fault = opt.inject_fault == fmt::format("{}:{}", name, i);
      const CaseResult r = fn(rng, c, fault);
      const bool ok = r.error <= r.tolerance;
      csv.row() << name << i << fmt::format("{:#018x}", seed) << c.input_side << c.filter_side
                << c.stride << c.channels << c.filters << r.error << r.tolerance
                << (ok ? "PASS" : "FAIL");
      if (ok) continue;
      ++failures;
      if (first_failure_reported) continue;
      first_failure_reported = true;
      err << fmt::format(
          "FAIL {}#{}: L_I={} L_k={} s={} C={} F={} error={} tolerance={}\n"
          "replay: hexcnn verify --seed {} --suite {} --cases {} --only-case {}\n",
          name, i, c.input_side, c.filter_side, c.stride, c.channels, c.filters, r.error,
          r.tolerance, opt.seed, name, opt.cases, i);
      if (opt.dump_dir) {
        const std::string stem = fmt::format("{}_{}", name, i);
        dump_case(*opt.dump_dir, stem, original);
        err << "inputs written to " << (*opt.dump_dir / stem).string() << "_{input,filters}.hxt\n";
      }
    }
  }
  if (failures > 0) {
    err << failures << " case(s) failed\n";
    return kVerifyFailed;
  }
  return kOk;
}

}  // namespace hexcnn::cli
