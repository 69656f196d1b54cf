#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hexcnn/cli/commands.hpp"
#include "hexcnn/cli/csv.hpp"
#include "hexcnn/cli/timing.hpp"
#include "hexcnn/io.hpp"

namespace hexcnn::cli {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "hexcnn");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (quoted) {
        if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else if (c == '"') {
          quoted = false;
        } else {
          cur += c;
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        fields.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    fields.push_back(cur);
    rows.push_back(fields);
  }
  return rows;
}

std::string column(const std::vector<std::vector<std::string>>& rows, std::size_t row,
                   const std::string& name) {
  const auto& header = rows.at(0);
  const auto it = std::find(header.begin(), header.end(), name);
  EXPECT_NE(it, header.end()) << name;
  return rows.at(row).at(static_cast<std::size_t>(it - header.begin()));
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("hexcnn_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

TEST(Csv, QuotesSpecialFields) {
  EXPECT_EQ(csv_escape("plain"), "plain");
  EXPECT_EQ(csv_escape("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(csv_escape("two\nlines"), "\"two\nlines\"");
  std::ostringstream s;
  {
    CsvWriter w(s, {"name", "value"});
    w.row() << "x,y" << 0.1;
  }
  EXPECT_EQ(s.str(), "name,value\n\"x,y\",0.1\n");
  CsvWriter w(s, {"one"});
  EXPECT_THROW((w.row() << "a" << "b"), std::logic_error);
}

TEST(Timing, Median) {
  EXPECT_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_EQ(median({4.0, 1.0, 3.0, 2.0}), 2.5);
  int calls = 0;
  EXPECT_EQ(time_repetitions([&] { ++calls; }, 5).size(), 5u);
  EXPECT_EQ(calls, 6);
}

TEST(SpaceReport, SideOneHundredTwenty) {
  const CliRun r = run_cli({"space-report", "--sizes", "30,120"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(column(rows, 2, "hex_input_cells"), "128523");
  EXPECT_EQ(column(rows, 2, "zeroout_input_cells"), "171363");
  EXPECT_EQ(column(rows, 2, "quasih_input_cells"), "149136");
  EXPECT_NEAR(std::stod(column(rows, 2, "input_saving_vs_zeroout_pct")), 25.0, 0.1);
  EXPECT_NEAR(std::stod(column(rows, 2, "conv_saving_vs_zeroout_pct")), 41.7, 0.1);
  EXPECT_NEAR(std::stod(column(rows, 2, "input_saving_vs_quasih_pct")), 13.8, 0.5);
  // Pure function of the arguments.
  EXPECT_EQ(run_cli({"space-report", "--sizes", "30,120"}).out, r.out);
}

TEST(Verify, ZeroCasesIsEmptyReport) {
  const CliRun r = run_cli({"verify", "--cases", "0"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(parse_csv(r.out).size(), 1u);
}

TEST(Verify, DefaultSuitesPass) {
  const CliRun r = run_cli({"--seed", "7", "verify", "--cases", "6"});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto rows = parse_csv(r.out);
  EXPECT_EQ(rows.size(), 1u + 6u * verify_suites().size());
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_EQ(column(rows, i, "status"), "PASS");
  EXPECT_EQ(run_cli({"--seed", "7", "verify", "--cases", "6"}).out, r.out);
}

TEST(Verify, InjectedFaultFailsAndNamesCase) {
  const fs::path dir = scratch("dump");
  const CliRun r = run_cli({"verify", "--cases", "4", "--inject-fault", "gemm:2", "--dump-dir",
                         dir.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("gemm#2"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("--only-case 2"), std::string::npos) << r.err;
  EXPECT_TRUE(fs::exists(dir / "gemm_2_input.hxt"));
  EXPECT_NO_THROW(io::load_hxt(dir / "gemm_2_filters.hxt"));
  const CliRun replay =
      run_cli({"verify", "--cases", "4", "--suite", "gemm", "--only-case", "2", "--inject-fault",
               "gemm:2"});
  EXPECT_EQ(replay.code, 1);
  EXPECT_EQ(parse_csv(replay.out).size(), 2u);
}

TEST(BenchConv, MacRatiosAreExact) {
  for (const auto& [side_k, ratio] : {std::pair<std::string, std::string>{"2", "7/9"},
                                      std::pair<std::string, std::string>{"3", "19/25"}}) {
    const CliRun r = run_cli({"bench-conv", "--sizes", "9", "--filter-side", side_k, "--reps", "5",
                           "--channels", "2", "--filters", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(column(rows, 1, "method"), "hex_direct");
    EXPECT_EQ(column(rows, 1, "mac_ratio_per_output_vs_zeroout"), ratio);
    EXPECT_EQ(column(rows, 2, "mac_ratio_per_output_vs_zeroout"), ratio);
    EXPECT_EQ(column(rows, 3, "mac_ratio_per_output_vs_zeroout"), "1/1");
  }
}

TEST(BenchConv, BadGeometryIsSkippedAndFewRepsRejected) {
  const CliRun skip = run_cli({"bench-conv", "--sizes", "6", "--stride", "3", "--reps", "5"});
  EXPECT_EQ(skip.code, 0);
  EXPECT_EQ(parse_csv(skip.out).size(), 1u);
  EXPECT_NE(skip.err.find("skipping"), std::string::npos);
  EXPECT_EQ(run_cli({"bench-conv", "--sizes", "9", "--reps", "2"}).code, 2);
}

TEST(BenchTrain, ZeroLearningRatePathsAgree) {
  const CliRun r = run_cli({"bench-train", "--preset", "hexlenet4", "--side", "17", "--batch", "2",
                         "--steps", "2", "--lr", "0", "--classes", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(column(rows, 1, "first_loss"), column(rows, 2, "first_loss"));
  EXPECT_EQ(column(rows, 1, "final_loss"), column(rows, 2, "final_loss"));
  EXPECT_EQ(std::stod(column(rows, 1, "trajectory_max_rel_diff")), 0.0);
  EXPECT_EQ(run_cli({"bench-train", "--side", "2"}).code, 2);
}

TEST(Resample, ConstantImageAutoSide) {
  const fs::path dir = scratch("resample");
  {
    std::ofstream pgm(dir / "flat.pgm");
    pgm << "P2 16 16 255\n";
    for (int i = 0; i < 256; ++i) pgm << "128 ";
  }
  const CliRun r = run_cli({"resample", (dir / "flat.pgm").string(), (dir / "flat.hxt").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const HexTensor t = io::load_hxt(dir / "flat.hxt");
  EXPECT_EQ(t.side(), 13);
  for (double v : t.values()) EXPECT_EQ(v, static_cast<double>(128.0f / 255.0f));

  {
    std::ofstream one(dir / "one.pgm");
    one << "P2 1 1 4 3\n";
  }
  ASSERT_EQ(run_cli({"resample", (dir / "one.pgm").string(), (dir / "one.hxt").string()}).code, 0);
  const HexTensor single = io::load_hxt(dir / "one.hxt");
  EXPECT_EQ(single.side(), 1);
  EXPECT_DOUBLE_EQ(single.values()[0], 0.75);

  EXPECT_EQ(run_cli({"resample", (dir / "missing.pgm").string(), (dir / "x.hxt").string()}).code, 2);
  EXPECT_EQ(run_cli({"resample", (dir / "one.pgm").string(), (dir / "x.hxt").string(), "--side",
                     "zero"})
                .code,
            2);
}

TEST(Usage, BadArgumentsExitTwo) {
  EXPECT_EQ(run_cli({}).code, 2);
  EXPECT_EQ(run_cli({"no-such-command"}).code, 2);
  EXPECT_EQ(run_cli({"--format", "json", "space-report"}).code, 2);
  EXPECT_EQ(run_cli({"verify", "--suite", "nope"}).code, 2);
  EXPECT_EQ(run_cli({"--help"}).code, 0);
}

int shell(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Binary, ExitCodesAndOutFile) {
  const std::string exe = HEXCNN_CLI_PATH;
  const fs::path dir = scratch("binary");
  EXPECT_EQ(shell(exe + " verify --cases 0 > /dev/null"), 0);
  EXPECT_EQ(shell(exe + " verify --cases 2 --inject-fault conv_oracle:1 > /dev/null 2>&1"), 1);
  EXPECT_EQ(shell(exe + " --threads 0 verify > /dev/null 2>&1"), 2);
  const fs::path csv = dir / "space.csv";
  EXPECT_EQ(shell(exe + " --out " + csv.string() + " space-report --sizes 120"), 0);
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header.rfind("side,", 0), 0u);
  EXPECT_EQ(shell("HEXCNN_THREADS=2 " + exe + " bench-conv --sizes 5 --reps 5 > " +
                  (dir / "b.csv").string()),
            0);
  std::ifstream b(dir / "b.csv");
  std::string line;
  std::getline(b, line);
  std::getline(b, line);
  EXPECT_NE(line.find(",2,5,"), std::string::npos) << line;
}

}  // namespace
}  // namespace hexcnn::cli
