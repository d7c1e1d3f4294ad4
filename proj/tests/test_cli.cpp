#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cli_app.hpp"
#include "sdris/maxent.hpp"

namespace sdris {
namespace {

namespace fs = std::filesystem;
using cli::json;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("sdris_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  std::string path(const std::string& rel) const { return (root_ / rel).string(); }

  static std::string read(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  // File contents with the wall-time line removed.
  static std::string stable(const std::string& p) {
    std::istringstream in(read(p));
    std::string line, out;
    while (std::getline(in, line))
      if (line.find("\"wall_time_seconds\"") == std::string::npos) out += line + "\n";
    return out;
  }

  static json load_json(const std::string& p) { return json::parse(read(p)); }

  // Runs the command twice into the same directory and compares every file.
  void expect_deterministic(const std::vector<std::string>& args, const std::string& out,
                            const std::vector<std::string>& files, int expected_rc = 0) {
    ASSERT_EQ(cli::run(args), expected_rc);
    std::vector<std::string> first;
    for (const auto& f : files) first.push_back(stable(path(out + "/" + f)));
    ASSERT_EQ(cli::run(args), expected_rc);
    for (std::size_t i = 0; i < files.size(); ++i) {
      EXPECT_FALSE(first[i].empty()) << files[i];
      EXPECT_EQ(first[i], stable(path(out + "/" + files[i]))) << files[i];
    }
  }

  void synth_nuisance(const std::string& out) {
    ASSERT_EQ(cli::run({"synth", "--kind", "nuisance", "--classes", "3", "--per-class", "6",
                        "--features", "12", "--irrelevance", "12", "--seed", "5", "--out",
                        path(out)}),
              0);
  }

  std::vector<std::string> eval_args(const std::string& cmd, const std::string& data,
                                     const std::string& out) {
    return {cmd,      "--plus",    path(data + "/plus.csv"), "--labels", path(data + "/labels.csv"),
            "--minus", path(data + "/minus.csv"), "--splits", "2", "--dims", "1,2",
            "--lambdas", "0,1", "--max-iters", "60", "--seed", "9", "--out", path(out)};
  }

  fs::path root_;
};

TEST_F(CliTest, SynthIsDeterministicAndReloads) {
  expect_deterministic({"synth", "--seed", "3", "--out", path("s")}, "s",
                       {"plus.csv", "minus.csv", "planted.csv", "manifest.json"});
  SynthSpec spec;
  spec.seed = 3;
  const SynthConflicting mem = synth_conflicting(spec);
  EXPECT_EQ(load_csv(path("s/plus.csv")).probs(), mem.plus.probs());
  EXPECT_EQ(load_csv(path("s/minus.csv")).probs(), mem.minus.probs());
  const json m = load_json(path("s/manifest.json"));
  EXPECT_EQ(m["format_version"], cli::kFormatVersion);
  EXPECT_EQ(m["config"]["spec"]["seed"], 3);
  EXPECT_EQ(m["config"]["spec"]["strong_amplitude"], spec.strong_amplitude);
}

TEST_F(CliTest, SynthNuisanceWritesLabels) {
  expect_deterministic({"synth", "--kind", "nuisance", "--seed", "1", "--out", path("n")}, "n",
                       {"plus.csv", "minus.csv", "planted.csv", "labels.csv", "manifest.json"});
  NuisanceSpec spec;
  spec.seed = 1;
  const NuisanceClasses mem = synth_nuisance_classes(spec);
  const JointTable plus = load_csv(path("n/plus.csv"));
  EXPECT_EQ(plus.probs(), mem.plus.probs());
  const cli::SampleLabels l = cli::load_labels(path("n/labels.csv"), plus.y_labels());
  EXPECT_EQ(l.ids, mem.labels);
}

TEST_F(CliTest, SynthUsageErrors) {
  EXPECT_EQ(cli::run({"synth", "--nx", "2", "--out", path("bad")}), cli::kExitUsage);
  EXPECT_FALSE(fs::exists(path("bad/manifest.json")));
  EXPECT_EQ(cli::run({"synth", "--kind", "other", "--out", path("bad")}), cli::kExitUsage);
  EXPECT_EQ(cli::run({"synth", "--nuisance", "1", "--kind", "nuisance", "--out", path("bad")}),
            cli::kExitUsage);
  EXPECT_EQ(cli::run({}), cli::kExitUsage);
}

TEST_F(CliTest, FitReportsConsistentInformation) {
  ASSERT_EQ(cli::run({"synth", "--out", path("s")}), 0);
  const std::vector<std::string> args{"fit", "--plus", path("s/plus.csv"), "--minus",
                                      path("s/minus.csv"), "--lambda", "1", "--restarts", "1",
                                      "--seed", "7", "--out", path("f")};
  expect_deterministic(args, "f", {"fit.json", "phi.csv"});
  const json j = load_json(path("f/fit.json"));
  EXPECT_EQ(j["config"]["lambda"], 1.0);
  EXPECT_EQ(j["config"]["seed"], 7);
  EXPECT_TRUE(j["result"]["converged"]);
  EXPECT_TRUE(j["failures"].empty());
  EXPECT_TRUE(j.contains("wall_time_seconds"));
  Matrix phi(16, 1);
  for (int x = 0; x < 16; ++x) phi(x, 0) = j["result"]["phi"][x][0];
  const JointTable plus = load_csv(path("s/plus.csv"));
  const JointTable minus = load_csv(path("s/minus.csv"));
  SolverOptions tight;
  tight.tolerance = 1e-12;
  const double ip = measurement_information(FeatureMap(phi), plus, tight).value;
  const double im = measurement_information(FeatureMap(phi), minus, tight).value;
  EXPECT_NEAR(j["result"]["info_plus"].get<double>(), ip, 1e-8);
  EXPECT_NEAR(j["result"]["info_minus"].get<double>(), im, 1e-8);
  EXPECT_NEAR(j["result"]["objective"].get<double>(), ip - im, 1e-8);
  EXPECT_FALSE(j["result"]["trace"].empty());
}

TEST_F(CliTest, FitOnProductTableHasNoInformation) {
  Matrix m(5, 4);
  const Vector px{{0.1, 0.3, 0.2, 0.25, 0.15}}, py{{0.4, 0.1, 0.3, 0.2}};
  m = px * py.transpose();
  save_csv(path("prod.csv"), JointTable::from_probabilities(m));
  ASSERT_EQ(cli::run({"fit", "--plus", path("prod.csv"), "--restarts", "1", "--out", path("f")}), 0);
  EXPECT_LE(load_json(path("f/fit.json"))["result"]["objective"].get<double>(), 1e-6);
}

TEST_F(CliTest, FitInputErrors) {
  ASSERT_EQ(cli::run({"synth", "--out", path("s")}), 0);
  EXPECT_EQ(cli::run({"fit", "--plus", path("missing.csv"), "--out", path("f")}), cli::kExitUsage);
  EXPECT_EQ(cli::run({"fit", "--plus", path("s/plus.csv"), "--lambda", "1", "--out", path("f")}),
            cli::kExitUsage);
  EXPECT_EQ(cli::run({"fit", "--plus", path("s/plus.csv"), "--dim", "16", "--out", path("f")}),
            cli::kExitUsage);
}

TEST_F(CliTest, FitIterationCapIsPartialFailure) {
  ASSERT_EQ(cli::run({"synth", "--out", path("s")}), 0);
  EXPECT_EQ(cli::run({"fit", "--plus", path("s/plus.csv"), "--minus", path("s/minus.csv"),
                      "--lambda", "1", "--max-iters", "2", "--restarts", "0", "--out", path("f")}),
            cli::kExitPartial);
  const json j = load_json(path("f/fit.json"));
  EXPECT_FALSE(j["result"]["converged"]);
  EXPECT_EQ(j["failures"].size(), 1u);
}

TEST_F(CliTest, SweepSinglePoint) {
  ASSERT_EQ(cli::run({"synth", "--out", path("s")}), 0);
  ASSERT_EQ(cli::run({"sweep", "--plus", path("s/plus.csv"), "--minus", path("s/minus.csv"),
                      "--lambdas", "0.5", "--out", path("w")}),
            0);
  std::istringstream csv(read(path("w/sweep.csv")));
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(csv, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0], "lambda,branch,info_plus,info_minus,objective,converged");
  EXPECT_EQ(lines[1].substr(0, 7), "0.5,up,");
  EXPECT_EQ(lines[2].substr(0, 9), "0.5,down,");
}

TEST_F(CliTest, SweepFindsTransitionAndCsvMatchesJson) {
  ASSERT_EQ(cli::run({"synth", "--out", path("s")}), 0);
  expect_deterministic({"sweep", "--plus", path("s/plus.csv"), "--minus", path("s/minus.csv"),
                        "--points", "30", "--out", path("w")},
                       "w", {"sweep.json", "sweep.csv"});
  const json j = load_json(path("w/sweep.json"));
  EXPECT_FALSE(j["transitions"].empty());
  EXPECT_EQ(j["config"]["lambdas"].size(), 30u);
  std::istringstream csv(read(path("w/sweep.csv")));
  std::string line;
  std::getline(csv, line);
  std::size_t row = 0;
  while (std::getline(csv, line)) {
    const auto cells = detail::split_csv_line(line);
    ASSERT_EQ(cells.size(), 6u);
    const json& pt = j["branches"][cells[1]][row % 30];
    const json& fit = pt["fit"];
    EXPECT_EQ(std::stod(cells[0]), pt["lambda"].get<double>());
    EXPECT_EQ(std::stod(cells[2]), fit["info_plus"].get<double>());
    EXPECT_EQ(std::stod(cells[3]), fit["info_minus"].get<double>());
    EXPECT_EQ(std::stod(cells[4]), fit["objective"].get<double>());
    EXPECT_EQ(cells[5] == "true", fit["converged"].get<bool>());
    ++row;
  }
  EXPECT_EQ(row, 60u);
}

TEST_F(CliTest, SweepRejectsDescendingGrid) {
  ASSERT_EQ(cli::run({"synth", "--out", path("s")}), 0);
  EXPECT_EQ(cli::run({"sweep", "--plus", path("s/plus.csv"), "--minus", path("s/minus.csv"),
                      "--lambdas", "1,0.5", "--out", path("w")}),
            cli::kExitUsage);
}

TEST_F(CliTest, EvalSingleMethodAndDeterminism) {
  synth_nuisance("n");
  auto args = eval_args("eval", "n", "e");
  const int rc = cli::run(args);
  ASSERT_NE(rc, cli::kExitUsage);
  const json j = load_json(path("e/eval.json"));
  EXPECT_EQ(j["methods"].size(), 4u);
  EXPECT_EQ(rc == 0, j["failures"].empty());
  expect_deterministic(args, "e", {"eval.json"}, rc);

  args.insert(args.end(), {"--methods", "cpca"});
  ASSERT_EQ(cli::run(args), 0);
  const json one = load_json(path("e/eval.json"));
  ASSERT_EQ(one["methods"].size(), 1u);
  EXPECT_EQ(one["methods"][0]["method"], "cpca");
  EXPECT_EQ(one["methods"][0]["splits"].size(), 2u);
  EXPECT_EQ(one["config"]["methods"], json::array({"cpca"}));
}

TEST_F(CliTest, PerdimRowsAndDeterminism) {
  synth_nuisance("n");
  auto args = eval_args("perdim", "n", "p");
  args.insert(args.end(), {"--methods", "pca,opca"});
  expect_deterministic(args, "p", {"perdim.csv", "perdim.json"});
  EXPECT_EQ(read(path("p/perdim.csv")).substr(0, 27), "method,d,mean_index,stderr\n");
  EXPECT_EQ(load_json(path("p/perdim.json"))["rows"].size(), 4u);  // 2 methods x 2 dims

  args = {"perdim", "--plus", path("n/plus.csv"), "--labels", path("n/labels.csv"), "--minus",
          path("n/minus.csv"), "--methods", "pca,opca", "--dims", "2", "--splits", "2", "--out",
          path("p")};
  ASSERT_EQ(cli::run(args), 0);
  std::istringstream csv(read(path("p/perdim.csv")));
  std::string line;
  int rows = 0;
  std::getline(csv, line);
  while (std::getline(csv, line)) {
    EXPECT_EQ(detail::split_csv_line(line)[1], "2");
    ++rows;
  }
  EXPECT_EQ(rows, 2);
}

TEST_F(CliTest, EvalFromImageDirectories) {
  auto pgm = [&](const std::string& rel, int a, int b) {
    write_file_atomic(path(rel), "P2\n2 2\n255\n" + std::to_string(a) + " " + std::to_string(b) +
                                     " 10 20\n");
  };
  for (int i = 0; i < 4; ++i) {
    pgm("img/class_a/" + std::to_string(i) + ".pgm", 200 + i, 20);
    pgm("img/class_b/" + std::to_string(i) + ".pgm", 20, 200 + i);
    pgm("noise/" + std::to_string(i) + ".pgm", 50 + 30 * i, 50);
  }
  ASSERT_EQ(cli::run({"eval", "--images", path("img"), "--minus-images", path("noise"),
                      "--methods", "pca", "--dims", "1", "--splits", "2", "--out", path("e")}),
            0);
  const json j = load_json(path("e/eval.json"));
  EXPECT_EQ(j["dataset"]["n_samples"], 8);
  EXPECT_EQ(j["dataset"]["classes"], json::array({"a", "b"}));
  EXPECT_NEAR(j["methods"][0]["mean_test_index"].get<double>(), 1.0, 1e-12);
}

TEST_F(CliTest, EvalInputErrors) {
  synth_nuisance("n");
  EXPECT_EQ(cli::run({"eval", "--plus", path("n/plus.csv"), "--out", path("e")}), cli::kExitUsage);
  EXPECT_EQ(cli::run({"eval", "--out", path("e")}), cli::kExitUsage);
  write_file_atomic(path("labels.csv"), "sample,label\nc0_0,a\n");
  EXPECT_EQ(cli::run({"eval", "--plus", path("n/plus.csv"), "--labels", path("labels.csv"),
                      "--minus", path("n/minus.csv"), "--out", path("e")}),
            cli::kExitUsage);
  EXPECT_EQ(cli::run({"eval", "--plus", path("n/plus.csv"), "--labels", path("n/labels.csv"),
                      "--minus", path("n/minus.csv"), "--methods", "lda", "--out", path("e")}),
            cli::kExitUsage);
}

TEST_F(CliTest, BinaryExitCodes) {
  const std::string bin = SDRIS_CLI_PATH;
  EXPECT_EQ(std::system((bin + " --help > /dev/null").c_str()), 0);
  const int rc = std::system((bin + " synth --nx 1 --out " + path("x") + " 2> /dev/null").c_str());
  ASSERT_TRUE(WIFEXITED(rc));
  EXPECT_EQ(WEXITSTATUS(rc), cli::kExitUsage);
  EXPECT_EQ(std::system((bin + " synth --out " + path("ok")).c_str()), 0);
  EXPECT_EQ(load_csv(path("ok/plus.csv")).probs(), synth_conflicting(SynthSpec{}).plus.probs());
}

}  // namespace
}  // namespace sdris
