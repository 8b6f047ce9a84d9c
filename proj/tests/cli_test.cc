/*
 * Copyright 2026 The monoaudit Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "monoaudit/cli.h"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "monoaudit/config.h"
#include "monoaudit/reports.h"
#include "monoaudit/synthgen.h"

namespace monoaudit {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("monoaudit_cli_" + std::string(
                                   ::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    unsetenv(kOutputDirEnv);
  }
  void TearDown() override {
    unsetenv(kOutputDirEnv);
    fs::remove_all(dir_);
  }

  int run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "monoaudit");
    out_.str("");
    err_.str("");
    return run(args, out_, err_);
  }

  fs::path write_spec(const SyntheticSpec& spec, const std::string& name = "spec.json") {
    const auto path = dir_ / name;
    write_file(path, dump_json(spec.to_json()));
    return path;
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

SyntheticSpec small_spec() {
  SyntheticSpec spec;
  spec.n_applicants = 600;
  spec.n_models = 8;
  spec.n_positions = 8;
  spec.k_distribution = {{1, 0.4}, {2, 0.3}, {3, 0.3}};
  spec.rho = 0.5;
  spec.group_mix = {{"A", 0.5}, {"B", 0.5}};
  spec.sim_applicants = 100;
  spec.sim_incomplete = 2;
  spec.planted = {.duplicates = 4, .test_models = 1, .test_model_rows = 5, .unscored = 3};
  return spec;
}

TEST_F(CliTest, HelpExitsZero) {
  EXPECT_EQ(run_cli({"--help"}), kExitOk);
  EXPECT_EQ(run_cli({"audit", "--help"}), kExitOk);
}

TEST_F(CliTest, UsageErrorsExitOne) {
  EXPECT_EQ(run_cli({}), kExitError);
  EXPECT_EQ(run_cli({"frobnicate"}), kExitError);
  EXPECT_EQ(run_cli({"ingest", "--input", (dir_ / "missing.csv").string()}), kExitError);
}

TEST_F(CliTest, InvalidSpecExitsOne) {
  SyntheticSpec spec;
  spec.n_applicants = 0;
  const auto path = write_spec(spec);
  EXPECT_EQ(run_cli({"generate", "--spec", path.string(), "--out", dir_.string()}),
            kExitError);
  EXPECT_NE(err_.str().find("n_applicants"), std::string::npos) << err_.str();
}

TEST_F(CliTest, MalformedDataExitsOne) {
  write_file(dir_ / "bad.csv", "application_id,applicant_id\nx,y\n");
  EXPECT_EQ(run_cli({"ingest", "--input", (dir_ / "bad.csv").string(), "--out",
                     (dir_ / "o").string()}),
            kExitError);
  EXPECT_NE(err_.str().find("error:"), std::string::npos);
}

TEST_F(CliTest, PipelineWritesEveryOutput) {
  const auto spec = write_spec(small_spec());
  ASSERT_EQ(run_cli({"generate", "--spec", spec.string(), "--out", dir_.string()}), kExitOk)
      << err_.str();
  const auto data = (dir_ / "dataset.csv").string();
  const auto out = (dir_ / "out").string();
  ASSERT_EQ(run_cli({"ingest", "--input", data, "--test-models", "test_m0", "--out", out}),
            kExitOk)
      << err_.str();
  EXPECT_NE(out_.str().find("duplicates: 4"), std::string::npos) << out_.str();
  const int audit = run_cli({"audit", "--input", data, "--out", out});
  EXPECT_TRUE(audit == kExitOk || audit == kExitAdverseImpact) << err_.str();
  ASSERT_EQ(run_cli({"homogenize", "--input", data, "--out", out}), kExitOk) << err_.str();
  ASSERT_EQ(run_cli({"simulate", "--input", data, "--outcomes",
                     (dir_ / "sim_outcomes.csv").string(), "--replicates", "20", "--out",
                     out}),
            kExitOk)
      << err_.str();
  ASSERT_EQ(run_cli({"fit", "--table", (fs::path(out) / "rejection_table.csv").string(),
                     "--out", (dir_ / "fit").string()}),
            kExitOk)
      << err_.str();
  for (const auto* name :
       {"cleaned.csv", "clean_report.json", "k_distribution.csv", "position_stats.csv",
        "soc_rollup.csv", "impact_summary.json", "distributions.csv", "rejection_curve.csv",
        "rejection_table.csv", "gof.json", "simulation.json", "simulation_summary.json",
        "simulation.csv", "floor.json"}) {
    EXPECT_TRUE(fs::exists(fs::path(out) / name)) << name;
  }
  EXPECT_TRUE(fs::exists(dir_ / "fit" / "fit.json"));
  const auto report = nlohmann::json::parse(slurp(fs::path(out) / "clean_report.json"));
  EXPECT_EQ(report.at("removed_test_models"), 5);
  EXPECT_EQ(report.at("removed_unscored"), 3);
}

TEST_F(CliTest, AdverseImpactExitsTwo) {
  SyntheticSpec spec;
  spec.n_applicants = 8000;
  spec.n_models = 10;
  spec.n_positions = 10;
  spec.group_mix = {{"A", 0.5}, {"B", 0.5}};
  const std::vector<std::size_t> positions = {0, 1};
  const auto path = write_spec(plant_adverse_impact(spec, "A", positions, 0.6));
  ASSERT_EQ(run_cli({"generate", "--spec", path.string(), "--out", dir_.string()}), kExitOk);
  EXPECT_EQ(run_cli({"audit", "--input", (dir_ / "dataset.csv").string(), "--out",
                     (dir_ / "a").string()}),
            kExitAdverseImpact)
      << err_.str();
  const auto summary = nlohmann::json::parse(slurp(dir_ / "a" / "impact_summary.json"));
  EXPECT_FALSE(summary.at("flagged_positions").empty());
}

TEST_F(CliTest, OutputDirectoryFromEnvironment) {
  const auto spec = write_spec(small_spec());
  const auto env_dir = dir_ / "from_env";
  setenv(kOutputDirEnv, env_dir.c_str(), 1);
  ASSERT_EQ(run_cli({"generate", "--spec", spec.string()}), kExitOk) << err_.str();
  EXPECT_TRUE(fs::exists(env_dir / "dataset.csv"));
  // --out wins over the environment.
  ASSERT_EQ(run_cli({"ingest", "--input", (env_dir / "dataset.csv").string(), "--out",
                     (dir_ / "flag").string()}),
            kExitOk);
  EXPECT_TRUE(fs::exists(dir_ / "flag" / "cleaned.csv"));
  EXPECT_FALSE(fs::exists(env_dir / "cleaned.csv"));
}

TEST_F(CliTest, ConfigFileAndFlagPrecedence) {
  const auto spec = write_spec(small_spec());
  ASSERT_EQ(run_cli({"generate", "--spec", spec.string(), "--out", dir_.string()}), kExitOk);
  RunConfig config;
  config.threshold = 0.99;
  config.output_dir = dir_ / "cfg";
  write_file(dir_ / "run.json", dump_json(config.to_json()));
  const auto data = (dir_ / "dataset.csv").string();
  ASSERT_EQ(run_cli({"ingest", "--config", (dir_ / "run.json").string(), "--input", data}),
            kExitOk)
      << err_.str();
  ASSERT_EQ(run_cli({"ingest", "--config", (dir_ / "run.json").string(), "--input", data,
                     "--threshold", "0.01", "--out", (dir_ / "flag").string()}),
            kExitOk);
  ASSERT_TRUE(fs::exists(dir_ / "cfg" / "cleaned.csv"));
  const auto strict = slurp(dir_ / "cfg" / "cleaned.csv");
  const auto loose = slurp(dir_ / "flag" / "cleaned.csv");
  EXPECT_NE(strict, loose);

  write_file(dir_ / "bad.json", "{\"threshhold\": 0.5}");
  EXPECT_EQ(run_cli({"ingest", "--config", (dir_ / "bad.json").string(), "--input", data}),
            kExitError);
}

TEST_F(CliTest, RepeatedRunsAreByteIdentical) {
  const auto spec = write_spec(small_spec());
  for (const auto* sub : {"a", "b"}) {
    const auto d = dir_ / sub;
    ASSERT_EQ(run_cli({"generate", "--spec", spec.string(), "--out", d.string()}), kExitOk);
    ASSERT_EQ(run_cli({"simulate", "--input", (d / "dataset.csv").string(), "--outcomes",
                       (d / "sim_outcomes.csv").string(), "--replicates", "10", "--seed", "3",
                       "--out", d.string()}),
              kExitOk);
  }
  for (const auto* name : {"dataset.csv", "ground_truth.json", "sim_outcomes.csv",
                           "simulation.json", "simulation.csv", "floor.json"}) {
    EXPECT_EQ(slurp(dir_ / "a" / name), slurp(dir_ / "b" / name)) << name;
  }
}

}  // namespace
}  // namespace monoaudit
