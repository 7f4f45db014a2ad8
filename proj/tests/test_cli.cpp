#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include <sys/wait.h>

#include <json.hpp>

#include "lass/csv.hpp"
#include "lass/kmodes.hpp"
#include "lass/model_io.hpp"
#include "oracles.hpp"

using namespace lass;
using lass::testing::Rng;
namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("lass_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path file(const std::string& name, const std::string& text) {
    io::write_text(dir_ / name, text);
    return dir_ / name;
  }
  fs::path path(const std::string& name) const { return dir_ / name; }
  std::string read(const std::string& name) const { return io::read_text(dir_ / name); }

  // Runs `lass <args>` with stdout and stderr captured into files.
  int lass(const std::string& args) {
    const std::string cmd = std::string("\"") + LASS_CLI_PATH + "\" " + args + " > \"" +
                            path("stdout").string() + "\" 2> \"" + path("stderr").string() + "\"";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  std::string out() const { return read("stdout"); }
  std::string err() const { return read("stderr"); }

  fs::path dir_;
};

const char* kBlobs = "0,0\n0.2,0.1\n3,3\n3.1,2.8\n";
const char* kClusterArgs = "--k 2 --sigma 0.5 --lambda 0.1 --bandwidth 0.5";

}  // namespace

TEST_F(Cli, ProjectWorkedExample) {
  const auto y = file("y.csv", "2,1\n0.3,0.7\n");
  ASSERT_EQ(lass("project --input " + y.string()), 0) << err();
  EXPECT_EQ(out(), "1,0\n0.3,0.7\n");
}

TEST_F(Cli, ProjectScaledSimplex) {
  const auto y = file("y.csv", "0,0\n");
  ASSERT_EQ(lass("project --a 2 --input " + y.string()), 0) << err();
  EXPECT_EQ(out(), "1,1\n");
}

TEST_F(Cli, ProjectOutputFileAndReport) {
  const auto y = file("y.csv", "a,b,c\n3,1,0\n0.5,0.5,0.5\n");
  ASSERT_EQ(lass("project --skip-header --input " + y.string() + " --output " +
                 path("x.csv").string() + " --report " + path("r.jsonl").string()),
            0)
      << err();
  EXPECT_EQ(out(), "");
  const MatrixXd x = io::parse_csv(read("x.csv"));
  EXPECT_EQ(x.rows(), 2);
  EXPECT_EQ(x(0, 0), 1.0);

  std::istringstream lines(read("r.jsonl"));
  std::string line;
  std::getline(lines, line);
  const auto first = nlohmann::json::parse(line);
  EXPECT_EQ(first["row"], 0);
  EXPECT_EQ(first["rho"], 1);
  EXPECT_EQ(first["lambda"].get<double>(), -2.0);
  std::getline(lines, line);
  const auto second = nlohmann::json::parse(line);
  EXPECT_EQ(second["rho"], 3);
  EXPECT_NEAR(second["lambda"].get<double>(), -1.0 / 6.0, 1e-15);
}

TEST_F(Cli, ProjectJsonFormat) {
  const auto y = file("y.csv", "2,1\n");
  ASSERT_EQ(lass("project --format json --input " + y.string()), 0) << err();
  EXPECT_EQ(nlohmann::json::parse(out()), nlohmann::json::parse("[[1,0]]"));
}

TEST_F(Cli, ProjectErrors) {
  EXPECT_EQ(lass("project --input " + file("empty.csv", "").string()), 2);
  EXPECT_NE(err().find("empty input"), std::string::npos);

  EXPECT_EQ(lass("project --input " + file("bad.csv", "1,2\n3,x\n").string()), 2);
  EXPECT_NE(err().find("row 2"), std::string::npos) << err();

  EXPECT_EQ(lass("project --input " + file("ragged.csv", "1,2\n3\n").string()), 2);
  EXPECT_EQ(lass("project --input " + file("nan.csv", "1,2\nnan,0\n").string()), 3);
  EXPECT_EQ(lass("project --input " + path("missing.csv").string()), 2);
  EXPECT_EQ(lass("frobnicate"), 2);
}

TEST_F(Cli, ClusterIsDeterministic) {
  const auto data = file("data.csv", kBlobs);
  const std::string args = std::string("cluster ") + kClusterArgs + " --input " + data.string();
  ASSERT_EQ(lass(args + " --output " + path("m1.json").string() + " --report " +
                 path("report.json").string()),
            0)
      << err();
  ASSERT_EQ(lass(args + " --output " + path("m2.json").string()), 0) << err();
  EXPECT_EQ(read("m1.json"), read("m2.json"));

  const auto model = io::load_model(path("m1.json"));
  for (Index n = 0; n < 4; ++n) EXPECT_GE(model.Z.row(n).maxCoeff(), 1.0 - 1e-3);
  EXPECT_NE(model.Z(0, 0) > 0.5, model.Z(2, 0) > 0.5);

  const auto report = nlohmann::json::parse(read("report.json"));
  EXPECT_TRUE(report["converged"].get<bool>());
  const auto trace = report["objective_trace"].get<std::vector<double>>();
  for (std::size_t i = 1; i < trace.size(); ++i) EXPECT_LE(trace[i], trace[i - 1] + 1e-8);
  EXPECT_TRUE(report.contains("wall_time_seconds"));
}

TEST_F(Cli, ClusterSingleCluster) {
  const auto data = file("data.csv", kBlobs);
  ASSERT_EQ(lass("cluster --k 1 --sigma 0.5 --lambda 0.1 --bandwidth 0.5 --input " + data.string()), 0)
      << err();
  const auto doc = nlohmann::json::parse(out());
  for (const auto& row : doc["assignments"]) EXPECT_EQ(row, nlohmann::json::parse("[1.0]"));
}

TEST_F(Cli, ClusterErrors) {
  const auto data = file("data.csv", kBlobs);
  EXPECT_EQ(lass("cluster --k 9 --sigma 0.5 --lambda 0.1 --bandwidth 0.5 --input " + data.string()), 2);
  EXPECT_EQ(lass("cluster --sigma 0.5 --lambda 0.1 --bandwidth 0.5 --input " + data.string()), 2);
  EXPECT_EQ(lass(std::string("cluster ") + kClusterArgs + " --input " +
                 file("nan.csv", "0,0\n1,inf\n").string()),
            3);
}

TEST_F(Cli, ClusterFlagsNonConvergence) {
  // Strong smoothing over a spread of points keeps Z fractional.
  const auto data = file("data.csv", "0,0\n0.3,0\n0.6,0\n0.9,0\n1.2,0\n1.5,0\n");
  EXPECT_EQ(lass("cluster --k 2 --sigma 0.5 --lambda 5 --bandwidth 0.5 --max-iter 1 --input " +
                 data.string() + " --output " + path("m.json").string()),
            4);
  EXPECT_NO_THROW(io::load_model(path("m.json")));
}

TEST_F(Cli, AssignMatchesLibrary) {
  const auto data = file("data.csv", kBlobs);
  ASSERT_EQ(lass(std::string("cluster ") + kClusterArgs + " --input " + data.string() + " --output " +
                 path("m.json").string()),
            0);
  const auto queries = file("q.csv", "0.1,0.05\n3.05,2.9\n1.5,1.5\n");
  ASSERT_EQ(lass("assign --model " + path("m.json").string() + " --input " + queries.string()), 0)
      << err();
  const MatrixXd Z = io::parse_csv(out());
  const auto model = io::load_model(path("m.json"));
  const MatrixXd Q = io::read_csv(queries);
  ASSERT_EQ(Z.rows(), 3);
  for (Index n = 0; n < 3; ++n) {
    const VectorXd expected = out_of_sample(model, make_query(model, Q.row(n)));
    EXPECT_LE((Z.row(n).transpose() - expected).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_NEAR(Z.row(n).sum(), 1.0, 1e-9);
  }
  const Index first = model.Z(0, 0) > 0.5 ? 0 : 1;
  EXPECT_GE(Z(0, first), 0.95);
  EXPECT_GE(Z(1, 1 - first), 0.95);
}

TEST_F(Cli, AssignErrors) {
  const auto data = file("data.csv", kBlobs);
  ASSERT_EQ(lass(std::string("cluster ") + kClusterArgs + " --input " + data.string() + " --output " +
                 path("m.json").string()),
            0);
  EXPECT_EQ(lass("assign --model " + path("m.json").string() + " --input " +
                 file("far.csv", "1000,1000\n").string()),
            5);
  EXPECT_NE(err().find("bandwidth"), std::string::npos);
  EXPECT_EQ(lass("assign --model " + path("m.json").string() + " --input " +
                 file("wide.csv", "0,0,0\n").string()),
            2);

  auto doc = nlohmann::json::parse(read("m.json"));
  doc["schema"] = "something-else";
  const auto bad = file("bad.json", doc.dump());
  EXPECT_EQ(lass("assign --model " + bad.string() + " --input " + data.string()), 2);
}

TEST_F(Cli, CheckPipeline) {
  Rng rng(100);
  const MatrixXd Y = rng.uniform_matrix(10, 6, -2.0, 2.0);
  const auto y = file("y.csv", io::format_csv(Y));
  ASSERT_EQ(lass("project --input " + y.string() + " --output " + path("x.csv").string()), 0);
  ASSERT_EQ(lass("check --input " + y.string() + " --projected " + path("x.csv").string()), 0)
      << out();
  EXPECT_NE(out().find("PASS"), std::string::npos);

  MatrixXd X = io::read_csv(path("x.csv"));
  X(3, 0) += 0.05;
  X(3, 1) -= 0.05;
  const auto tampered = file("tampered.csv", io::format_csv(X));
  EXPECT_EQ(lass("check --input " + y.string() + " --projected " + tampered.string()), 1);
  EXPECT_NE(out().find("FAIL"), std::string::npos);
  EXPECT_NE(out().find("worst_row 4"), std::string::npos) << out();

  EXPECT_EQ(lass("check --input " + y.string() + " --projected " +
                 file("short.csv", "1,0\n").string()),
            2);
}

TEST_F(Cli, CheckTolerance) {
  // x is the exact projection of y with a 1e-8 error on the sum.
  const auto y = file("y.csv", "0.5,0.5\n");
  const auto x = file("x.csv", "0.50000001,0.5\n");
  EXPECT_EQ(lass("check --tol 1e-6 --input " + y.string() + " --projected " + x.string()), 0) << out();
  EXPECT_EQ(lass("check --tol 1e-10 --input " + y.string() + " --projected " + x.string()), 1) << out();
}
