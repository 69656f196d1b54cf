#include <CLI11.hpp>

#include <fstream>
#include <memory>
#include <ostream>

#include "hexcnn/cli/commands.hpp"
#include "hexcnn/parallel.hpp"

namespace hexcnn::cli {

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hexagonal convolution toolkit: verification, space reports, benchmarks, resampling"};
  app.require_subcommand(1);

  int threads = 0;
  std::uint64_t seed = 1;
  std::string out_path;
  std::string format = "csv";
  app.add_option("--threads", threads, "Kernel thread cap (default: $HEXCNN_THREADS or all cores)")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Random seed")->capture_default_str();
  app.add_option("--out", out_path, "Write the report to this file instead of stdout");
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"csv"}))
      ->capture_default_str();

  VerifyOptions verify;
  int only_case = -1;
  std::string dump_dir;
  auto* verify_cmd = app.add_subcommand("verify", "Run the equivalence and gradient suites");
  verify_cmd->add_option("--cases", verify.cases, "Cases per suite")->capture_default_str();
  verify_cmd->add_option("--suite", verify.suites, "Restrict to these suites")
      ->delimiter(',')
      ->check(CLI::IsMember(verify_suites()));
  verify_cmd->add_option("--only-case", only_case, "Run a single case index (replay)");
  verify_cmd->add_option("--dump-dir", dump_dir, "Write the first failing case's inputs here");
  verify_cmd->add_option("--inject-fault", verify.inject_fault,
                         "Test hook: corrupt the result of case SUITE:INDEX");

  SpaceOptions space;
  space.sizes = {30, 40, 50, 60, 70, 80, 90, 100, 110, 120};
  auto* space_cmd = app.add_subcommand("space-report", "Closed-form memory footprints per side");
  space_cmd->add_option("--sizes", space.sizes, "Hexagon sides")->delimiter(',')
      ->capture_default_str();
  space_cmd->add_option("--filter-side", space.filter_side)->capture_default_str()
      ->check(CLI::PositiveNumber);
  space_cmd->add_option("--stride", space.stride)->capture_default_str()
      ->check(CLI::PositiveNumber);
  space_cmd->add_option("--channels", space.channels)->capture_default_str()
      ->check(CLI::PositiveNumber);
  space_cmd->add_option("--filters", space.filters)->capture_default_str()
      ->check(CLI::PositiveNumber);

  BenchConvOptions conv;
  conv.sizes = {64, 128, 256};
  auto* conv_cmd = app.add_subcommand("bench-conv", "Time direct, GEMM and ZeroOut convolution");
  conv_cmd->add_option("--sizes", conv.sizes, "Input sides")->delimiter(',')
      ->capture_default_str();
  conv_cmd->add_option("--filter-side", conv.filter_side)->capture_default_str()
      ->check(CLI::PositiveNumber);
  conv_cmd->add_option("--stride", conv.stride)->capture_default_str()
      ->check(CLI::PositiveNumber);
  conv_cmd->add_option("--channels", conv.channels)->capture_default_str();
  conv_cmd->add_option("--filters", conv.filters)->capture_default_str();
  conv_cmd->add_option("--reps", conv.reps, "Timed repetitions (>= 5)")->capture_default_str();
  conv_cmd->add_option("--methods", conv.methods, "hex_direct, hex_gemm, zeroout_ref")
      ->delimiter(',');

  BenchTrainOptions train;
  auto* train_cmd = app.add_subcommand("bench-train", "Time one SGD batch on both layouts");
  train_cmd->add_option("--preset", train.preset)
      ->check(CLI::IsMember({"hexlenet", "hexlenet4", "hexlenet5"}))
      ->capture_default_str();
  train_cmd->add_option("--side", train.side)->capture_default_str()->check(CLI::PositiveNumber);
  train_cmd->add_option("--batch", train.batch)->capture_default_str();
  train_cmd->add_option("--steps", train.steps, "Steps in the trajectory comparison")
      ->capture_default_str();
  train_cmd->add_option("--reps", train.reps, "Timed batches (>= 5)")->capture_default_str();
  train_cmd->add_option("--classes", train.classes)->capture_default_str();
  train_cmd->add_option("--lr", train.learning_rate)->capture_default_str();

  ResampleOptions resample;
  auto* resample_cmd = app.add_subcommand("resample", "Resample an image onto a hexagon (HXT1)");
  resample_cmd->add_option("input", resample.input, "IMG1, PGM or PPM image")->required();
  resample_cmd->add_option("output", resample.output, "Output HXT1 path")->required();
  resample_cmd->add_option("--side", resample.side, "Hexagon side or 'auto'")
      ->capture_default_str();
  resample_cmd->add_option("--scale", resample.scale, "Cell spacing in pixels or 'fit'")
      ->capture_default_str();
  resample_cmd->add_flag("--f32", resample.single_precision, "Store 4-byte floats");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  if (threads > 0) set_max_threads(threads);

  std::unique_ptr<std::ofstream> file;
  std::ostream* report = &out;
  if (!out_path.empty()) {
    file = std::make_unique<std::ofstream>(out_path, std::ios::binary);
    if (!*file) {
      err << "error: cannot write " << out_path << '\n';
      return kUsage;
    }
    report = file.get();
  }

  if (verify_cmd->parsed()) {
    verify.seed = seed;
    if (only_case >= 0) verify.only_case = only_case;
    if (!dump_dir.empty()) verify.dump_dir = dump_dir;
    return cmd_verify(verify, *report, err);
  }
  if (space_cmd->parsed()) return cmd_space_report(space, *report, err);
  if (conv_cmd->parsed()) {
    conv.seed = seed;
    return cmd_bench_conv(conv, *report, err);
  }
  if (train_cmd->parsed()) {
    train.seed = seed;
    return cmd_bench_train(train, *report, err);
  }
  return cmd_resample(resample, *report, err);
}

}  // namespace hexcnn::cli
