#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "kspin/commands.hpp"
#include "kspin/tensor_io.hpp"

using namespace kspin;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("kspin_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, GenerateIsByteIdentical) {
  const auto a = cli({"generate", "--p", "8", "--k", "3", "--d", "3", "--seed", "4", "--beta", "0.5"});
  const auto b = cli({"generate", "--p", "8", "--k", "3", "--d", "3", "--seed", "4", "--beta", "0.5"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.err.find("edges=8"), std::string::npos);
  std::istringstream in(a.out);
  const auto J = read_tensor_csv(in);
  EXPECT_EQ(J.edge_count(), 8u);
  for (const auto& [e, w] : J.entries()) EXPECT_EQ(w, 0.5);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(cli({}).code, 1);
  EXPECT_EQ(cli({"frobnicate"}).code, 1);
  EXPECT_EQ(cli({"--help"}).code, 0);
  EXPECT_EQ(cli({"generate", "--p", "5", "--k", "3", "--d", "2"}).code, 1);
  EXPECT_EQ(cli({"sample", "--tensor", path("missing.csv"), "--n", "5"}).code, 3);
  EXPECT_EQ(cli({"fit", "--samples", path("missing.csv")}).code, 3);
}

TEST_F(CliTest, MalformedSamplesNameTheLine) {
  std::ofstream(path("bad.csv")) << "1,-1,1\n1,-1,1\n1,0,1\n";
  const auto r = cli({"fit", "--samples", path("bad.csv"), "--k", "3"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("bad.csv:3"), std::string::npos) << r.err;
}

TEST_F(CliTest, SampleFitPipelineAndConfigPrecedence) {
  ASSERT_EQ(cli({"generate", "--p", "6", "--k", "3", "--d", "2", "--beta", "1.2", "--coupling-scale", "hyperedge",
                 "--out", path("t.csv")})
                .code,
            0);
  ASSERT_EQ(cli({"sample", "--tensor", path("t.csv"), "--n", "20000", "--seed", "2", "--out", path("x.csv")}).code, 0);
  std::ofstream(path("fit.json")) << R"({"method": "rple", "lambda": "fixed", "lambda_value": 0.02,
                                       "reconcile": "max", "k": 3})";
  const auto r = cli({"fit", "--config", path("fit.json"), "--samples", path("x.csv"), "--truth", path("t.csv"),
                      "--method", "rise", "--out", path("report.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = nlohmann::json::parse(slurp(path("report.json")));
  EXPECT_EQ(report["method"], "rise");
  EXPECT_NEAR(report["nodes"][0]["lambda"].get<double>(), 0.02, 1e-15);
  EXPECT_TRUE(report["metrics"]["exact_support"].get<bool>());

  std::ofstream(path("bad.json")) << R"({"method": "rple", "no_such_flag": 1})";
  EXPECT_EQ(cli({"fit", "--config", path("bad.json"), "--samples", path("x.csv")}).code, 1);
}

TEST_F(CliTest, ExperimentWritesCsv) {
  std::ofstream(path("exp.json")) << R"({"p": 6, "k": 3, "d": 2, "n_grid": [300], "beta_grid": [1],
                                       "seeds": [0, 1], "methods": ["rple"],
                                       "lambda_rule": {"type": "fixed", "value": 0.05}})";
  const auto r = cli({"experiment", "--config", path("exp.json"), "--out", path("res.csv"), "--no-timing"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = slurp(path("res.csv"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  EXPECT_NE(r.err.find("2 cells, 0 failed"), std::string::npos) << r.err;
}

TEST_F(CliTest, GenesAndDiag) {
  std::ofstream data(path("g.csv"));
  data << "id,A,B,C,D\n";
  for (int i = 0; i < 64; ++i) data << "s" << i << ',' << (i & 1) << ',' << (i >> 1 & 1) << ',' << (i >> 2 & 1) << ',' << (i >> 3 & 1) << '\n';
  data.close();
  const auto g = cli({"genes", "--data", path("g.csv"), "--ignore-columns", "id", "--out", path("gout")});
  ASSERT_EQ(g.code, 0) << g.err;
  EXPECT_TRUE(fs::exists(path("gout/all_hyperedges.csv")));
  EXPECT_EQ(slurp(path("gout/node_map.csv")), "node,gene\n1,A\n2,B\n3,C\n4,D\n");

  ASSERT_EQ(cli({"generate", "--p", "5", "--k", "3", "--d", "3", "--beta", "0.2", "--out", path("t.csv")}).code, 0);
  ASSERT_EQ(cli({"sample", "--tensor", path("t.csv"), "--n", "2000", "--out", path("x.csv")}).code, 0);
  const auto d = cli({"diag", "--samples", path("x.csv"), "--truth", path("t.csv")});
  ASSERT_EQ(d.code, 0) << d.err;
  EXPECT_EQ(std::count(d.out.begin(), d.out.end(), '\n'), 6);
}
