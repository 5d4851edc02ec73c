// Copyright 2026 The SPA Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "spa/io.hpp"

namespace spa::cli {
namespace {

namespace fs = std::filesystem;
const std::string kFixtures = SPA_FIXTURE_DIR;

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

Outcome invoke(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  Outcome o;
  o.code = run(args, out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

std::string fixture(const std::string& name) { return kFixtures + "/" + name; }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("spa_cli_" +
            std::string(::testing::UnitTest::GetInstance()
                            ->current_test_info()
                            ->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    ::unsetenv("SPA_SEED");
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path dir_;
};

TEST_F(CliTest, ComputeFullTableFlatEqualsPa) {
  const auto o = invoke({"compute", "--input", fixture("full.csv"), "--scheme",
                         "all"});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  const auto j = nlohmann::json::parse(o.out);
  ASSERT_FALSE(j["pa"].is_null());
  EXPECT_EQ(j["spa_by_scheme"]["flat"], j["pa"]);
  EXPECT_EQ(j["spa_by_scheme"].size(), 6u);
  EXPECT_FALSE(j["fleiss_kappa"].is_null());
}

TEST_F(CliTest, ComputeElevenAnnotators) {
  const auto o =
      invoke({"compute", "--input", fixture("eleven.csv"), "--scheme", "flat"});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  const auto j = nlohmann::json::parse(o.out);
  EXPECT_NEAR(j["spa_by_scheme"]["flat"].get<double>(), 14.0 / 55.0, 1e-12);
}

TEST_F(CliTest, ComputeSparseAnnotationsM1) {
  const auto o = invoke({"compute", "--input", fixture("sparse.csv"),
                         "--scheme", "annotations_m1"});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  const auto j = nlohmann::json::parse(o.out);
  EXPECT_EQ(j["items_excluded"], 1);
  EXPECT_NEAR(j["spa_by_scheme"]["annotations_m1"].get<double>(), 2.0 / 3.0,
              1e-12);
  EXPECT_TRUE(j["pa"].is_null());
  EXPECT_TRUE(j["fleiss_kappa"].is_null());
  EXPECT_FALSE(j["fleiss_kappa_refusal"].is_null());
}

TEST_F(CliTest, ComputeClassDist) {
  const auto o = invoke({"compute", "--input", fixture("sparse.csv"),
                         "--scheme", "flat,inv_var_class", "--class-dist",
                         fixture("sparse_class_dist.json"), "--format", "csv"});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  EXPECT_NE(o.out.find("spa,inv_var_class,"), std::string::npos);
  const auto conflict = invoke({"compute", "--input", fixture("sparse.csv"),
                                "--scheme", "flat", "--class-dist",
                                fixture("sparse_class_dist.json")});
  EXPECT_EQ(conflict.code, kExitUsage);
}

TEST_F(CliTest, ComputeWritesOutputFile) {
  const auto path = (dir_ / "report.json").string();
  const auto o = invoke({"compute", "--input", fixture("full.csv"), "--output",
                         path});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  EXPECT_TRUE(o.out.empty());
  EXPECT_NO_THROW(nlohmann::json::parse(read_file(path)));
}

TEST_F(CliTest, DataErrorsExitTwo) {
  const auto empty = invoke({"compute", "--input", fixture("empty.csv")});
  EXPECT_EQ(empty.code, kExitDataError);
  const auto err = nlohmann::json::parse(empty.err);
  EXPECT_EQ(err["error"]["code"], "empty_table");
  EXPECT_EQ(err["error"]["exit_code"], 2);

  EXPECT_EQ(invoke({"compute", "--input", fixture("duplicates.csv")}).code,
            kExitDataError);
  EXPECT_EQ(invoke({"compute", "--input", fixture("missing.csv")}).code,
            kExitDataError);
  EXPECT_EQ(invoke({"compute", "--input", fixture("duplicates.csv"),
                    "--duplicates", "first"})
                .code,
            kExitOk);
}

TEST_F(CliTest, UsageErrorsExitSixtyFour) {
  EXPECT_EQ(invoke({}).code, kExitUsage);
  EXPECT_EQ(invoke({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(invoke({"compute"}).code, kExitUsage);
  EXPECT_EQ(invoke({"compute", "--input", fixture("full.csv"), "--scheme",
                    "nope"})
                .code,
            kExitUsage);
  EXPECT_EQ(invoke({"compute", "--input", fixture("full.csv"), "--format",
                    "xml"})
                .code,
            kExitUsage);
  EXPECT_EQ(invoke({"weight-curve", "--scheme", "inv_var", "--n-max", "5"}).code,
            kExitUsage);
  EXPECT_EQ(invoke({"weight-curve", "--scheme", "edge", "--n-max", "5",
                    "--class-dist", fixture("sparse_class_dist.json")})
                .code,
            kExitUsage);
  EXPECT_EQ(invoke({"simulate", "--mode", "unbiasedness"}).code, kExitUsage);
  EXPECT_EQ(invoke({"--help"}).code, kExitOk);
}

TEST_F(CliTest, WeightCurveEdge) {
  const auto o = invoke({"weight-curve", "--scheme", "edge", "--n-max", "4"});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  EXPECT_EQ(o.out, "n,normalized_weight\n1,0\n2,0.166666666667\n3,0.5\n4,1\n");
  const auto flat = invoke({"weight-curve", "--scheme", "flat", "--n-max", "3"});
  EXPECT_EQ(flat.out, "n,normalized_weight\n1,0\n2,1\n3,1\n");
}

TEST_F(CliTest, WeightCurveInvVarClassCounts) {
  const auto two = invoke({"weight-curve", "--scheme", "inv_var", "--classes",
                           "2", "--n-max", "10"});
  const auto seven = invoke({"weight-curve", "--scheme", "inv_var",
                             "--classes", "7", "--n-max", "10"});
  ASSERT_EQ(two.code, kExitOk);
  ASSERT_EQ(seven.code, kExitOk);
  std::istringstream a(two.out);
  std::istringstream b(seven.out);
  std::string la;
  std::string lb;
  std::getline(a, la);
  std::getline(b, lb);
  while (std::getline(a, la) && std::getline(b, lb)) {
    const double wa = std::stod(la.substr(la.find(',') + 1));
    const double wb = std::stod(lb.substr(lb.find(',') + 1));
    EXPECT_NEAR(wa, wb, 1e-6 * std::max(1.0, wa));
  }
  const auto cls = invoke({"weight-curve", "--scheme", "inv_var_class",
                           "--class-dist", fixture("sparse_class_dist.json"),
                           "--n-max", "6"});
  EXPECT_EQ(cls.code, kExitOk) << cls.err;
}

TEST_F(CliTest, ValidateFixtures) {
  const auto eleven = invoke({"validate", "--input", fixture("eleven.csv")});
  ASSERT_EQ(eleven.code, kExitOk);
  EXPECT_NE(eleven.out.find("   11  1\n"), std::string::npos) << eleven.out;
  const auto half = invoke({"validate", "--input", fixture("half_sparse.csv")});
  EXPECT_NE(half.out.find("4 items below pairable threshold"),
            std::string::npos);
  const auto empty = invoke({"validate", "--input", fixture("empty.csv")});
  EXPECT_EQ(empty.code, kExitDataError);
  EXPECT_NE(empty.err.find("empty"), std::string::npos);
}

TEST_F(CliTest, SimulateUnbiasednessDeterministic) {
  const std::vector<std::string> base{
      "simulate", "--synthetic", "items=30,annotators=4,classes=3,skew=0.5",
      "--mode", "unbiasedness", "--trials", "1", "--seed", "7"};
  auto a_args = base;
  a_args.insert(a_args.end(), {"--output-dir", (dir_ / "a").string()});
  auto b_args = base;
  b_args.insert(b_args.end(), {"--output-dir", (dir_ / "b").string()});
  const auto a = invoke(a_args);
  const auto b = invoke(b_args);
  ASSERT_EQ(a.code, kExitOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  for (const char* f : {"unbiasedness.csv", "manifest.json"}) {
    EXPECT_EQ(read_file(dir_ / "a" / f), read_file(dir_ / "b" / f)) << f;
  }
  const auto manifest = nlohmann::json::parse(read_file(dir_ / "a/manifest.json"));
  EXPECT_EQ(manifest["trial_config"]["trials"], 1);
  EXPECT_EQ(manifest["trial_config"]["seed"], 7);
  EXPECT_EQ(manifest["trial_config"]["scheme_set"].size(), 5u);
}

TEST_F(CliTest, SeedFromEnvironment) {
  const std::vector<std::string> args{
      "simulate", "--synthetic", "items=20,annotators=4", "--mode",
      "unbiasedness", "--trials", "5", "--output-dir", dir_.string()};
  ::setenv("SPA_SEED", "31", 1);
  ASSERT_EQ(invoke(args).code, kExitOk);
  EXPECT_EQ(nlohmann::json::parse(read_file(dir_ / "manifest.json"))
                ["trial_config"]["seed"],
            31);
  auto flagged = args;
  flagged.insert(flagged.end(), {"--seed", "4"});
  ASSERT_EQ(invoke(flagged).code, kExitOk);
  EXPECT_EQ(nlohmann::json::parse(read_file(dir_ / "manifest.json"))
                ["trial_config"]["seed"],
            4);
  ::unsetenv("SPA_SEED");
}

TEST_F(CliTest, SimulateFlatCurvesHaveZeroDelta) {
  const auto o = invoke({"simulate", "--input", fixture("full.csv"), "--mode",
                         "variance-curves", "--schemes", "flat", "--trials",
                         "20", "--output-dir", dir_.string()});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  std::istringstream csv(read_file(dir_ / "curves.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "scheme,annotation_count,variance,variance_minus_flat");
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    EXPECT_EQ(line.substr(line.rfind(',') + 1), "0") << line;
  }
  EXPECT_GT(rows, 1);
  EXPECT_TRUE(fs::exists(dir_ / "sum_under_curve.csv"));
}

TEST_F(CliTest, SimulateConstantKInfeasible) {
  const auto ok = invoke({"simulate", "--input", fixture("full.csv"), "--mode",
                          "constant-k", "--k-values", "2,9", "--trials", "10",
                          "--output-dir", (dir_ / "ok").string()});
  EXPECT_EQ(ok.code, kExitOk) << ok.err;
  EXPECT_NE(ok.err.find("k=9"), std::string::npos);
  const auto none = invoke({"simulate", "--input", fixture("full.csv"),
                            "--mode", "constant-k", "--k-values", "8,9",
                            "--trials", "10", "--output-dir",
                            (dir_ / "none").string()});
  EXPECT_EQ(none.code, kExitInfeasible);
  EXPECT_FALSE(fs::exists(dir_ / "none" / "curves.csv"));
}

TEST_F(CliTest, SimulateAllSkippedIsInfeasible) {
  const auto o = invoke({"simulate", "--input", fixture("sparse.csv"),
                         "--mode", "unbiasedness", "--removals", "5",
                         "--trials", "10", "--output-dir", dir_.string()});
  EXPECT_EQ(o.code, kExitInfeasible);
  EXPECT_FALSE(fs::exists(dir_ / "manifest.json"));
}

}  // namespace
}  // namespace spa::cli
