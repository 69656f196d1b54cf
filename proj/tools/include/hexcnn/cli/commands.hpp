#pragma once

// Subcommands of the hexcnn tool. Each returns a process exit code:
// 0 success, 1 verification failure, 2 usage or input error.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hexcnn::cli {

enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kUsage = 2 };

struct VerifyOptions {
  std::uint64_t seed = 1;
  int cases = 50;  // per suite
  std::vector<std::string> suites;  // empty: all
  std::optional<int> only_case;
  /// "suite:index" whose hexagonal result is corrupted before comparison.
  std::string inject_fault;
  std::optional<std::filesystem::path> dump_dir;
};

/// Suite names, in run order.
const std::vector<std::string>& verify_suites();

int cmd_verify(const VerifyOptions& opt, std::ostream& out, std::ostream& err);

struct SpaceOptions {
  std::vector<int> sizes;
  int filter_side = 2;
  int stride = 1;
  int channels = 3;
  int filters = 1;
};

int cmd_space_report(const SpaceOptions& opt, std::ostream& out, std::ostream& err);

struct BenchConvOptions {
  std::vector<int> sizes;
  int filter_side = 2;
  int stride = 1;
  int channels = 3;
  int filters = 8;
  int reps = 5;
  std::uint64_t seed = 1;
  std::vector<std::string> methods;  // empty: hex_direct, hex_gemm, zeroout_ref
};

int cmd_bench_conv(const BenchConvOptions& opt, std::ostream& out, std::ostream& err);

struct BenchTrainOptions {
  std::string preset = "hexlenet5";
  int side = 37;
  int batch = 8;
  int steps = 3;
  int reps = 5;
  int classes = 10;
  double learning_rate = 0.01;
  std::uint64_t seed = 1;
};

int cmd_bench_train(const BenchTrainOptions& opt, std::ostream& out, std::ostream& err);

struct ResampleOptions {
  std::filesystem::path input;
  std::filesystem::path output;
  std::string side = "auto";   // integer or "auto"
  std::string scale = "fit";   // positive real or "fit"
  bool single_precision = false;
};

int cmd_resample(const ResampleOptions& opt, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches. Output goes to `out` unless --out is given.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hexcnn::cli
