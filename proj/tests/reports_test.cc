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

#include "monoaudit/reports.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "monoaudit/errors.h"
#include "monoaudit/synthgen.h"

namespace monoaudit {
namespace {

TEST(PositionStats, RoundTripIsExact) {
  SyntheticSpec spec;
  spec.n_applicants = 3000;
  spec.n_models = 6;
  spec.n_positions = 6;
  spec.k_distribution = {{2, 1.0}};
  spec.group_mix = {{"A", 0.4}, {"B", 0.4}, {"C", 0.2}};
  spec.group_effects = {{"B", 1, -0.2}};
  const auto records = binarize(generate(spec).records);
  const auto stats = audit_positions(records, {});
  ASSERT_FALSE(stats.empty());
  std::stringstream csv;
  write_position_stats(csv, stats);
  const auto back = read_position_stats(csv);
  ASSERT_EQ(back.size(), stats.size());
  for (std::size_t i = 0; i < stats.size(); ++i) {
    EXPECT_EQ(back[i].position_id, stats[i].position_id);
    EXPECT_EQ(back[i].group, stats[i].group);
    EXPECT_EQ(back[i].n, stats[i].n);
    EXPECT_EQ(back[i].selected, stats[i].selected);
    EXPECT_EQ(back[i].selection_rate, stats[i].selection_rate);
    EXPECT_EQ(back[i].impact_ratio, stats[i].impact_ratio);
    EXPECT_EQ(back[i].z, stats[i].z);
    EXPECT_EQ(back[i].p_value, stats[i].p_value);
    EXPECT_EQ(back[i].flag_adverse_bh, stats[i].flag_adverse_bh);
    // Columns recompute from the counts.
    EXPECT_DOUBLE_EQ(back[i].selection_rate,
                     static_cast<double>(back[i].selected) / static_cast<double>(back[i].n));
    EXPECT_DOUBLE_EQ(back[i].impact_ratio, back[i].selection_rate / back[i].reference_rate);
  }
}

TEST(RejectionTable, RoundTrip) {
  const std::vector<RejectionPoint> points = {{1, 0.5, 0.45, 1200}, {2, 0.3, 0.2, 800}};
  std::stringstream csv;
  write_rejection_table(csv, points);
  EXPECT_EQ(csv.str(),
            "k,count,baseline,observed\n"
            "1,1200,0.4500,0.5000\n"
            "2,800,0.2000,0.3000\n");
  const auto back = read_rejection_table(csv);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].k, 2u);
  EXPECT_EQ(back[1].n_applicants, 800u);
  EXPECT_DOUBLE_EQ(back[1].observed_rate, 0.3);
  EXPECT_DOUBLE_EQ(back[1].baseline_rate, 0.2);
}

TEST(RejectionTable, PercentAndThousands) {
  std::istringstream in("k,count,baseline,observed\n3,\"1,024\",12.5%,0.2\n");
  const auto points = read_rejection_table(in);
  ASSERT_EQ(points.size(), 1u);
  EXPECT_EQ(points[0].n_applicants, 1024u);
  EXPECT_DOUBLE_EQ(points[0].baseline_rate, 0.125);
  EXPECT_DOUBLE_EQ(points[0].observed_rate, 0.2);
  std::istringstream bad("k,count,baseline,observed\n3,10,abc,0.2\n");
  EXPECT_THROW(read_rejection_table(bad), DataError);
}

TEST(KDistribution, OpenBucketLabel) {
  const std::vector<KDistributionRow> rows = {{1, false, 3, 75.0}, {5, true, 1, 25.0}};
  std::ostringstream out;
  write_k_distribution(out, rows);
  EXPECT_NE(out.str().find("\n5+,1,"), std::string::npos) << out.str();
}

TEST(DumpJson, TrailingNewline) {
  EXPECT_EQ(dump_json(nlohmann::json{{"a", 1}}), "{\n  \"a\": 1\n}\n");
}

TEST(WriteFile, CreatesParents) {
  const auto dir = std::filesystem::temp_directory_path() / "monoaudit_reports_test";
  std::filesystem::remove_all(dir);
  write_file(dir / "x" / "y.txt", "hello");
  std::ifstream in(dir / "x" / "y.txt");
  std::string s;
  std::getline(in, s);
  EXPECT_EQ(s, "hello");
  std::filesystem::remove_all(dir);
}

TEST(SimulationSummary, ReportsCrossings) {
  std::vector<SimulationResult> curve(3);
  for (std::size_t i = 0; i < 3; ++i) {
    curve[i].k = i + 1;
    curve[i].systemic_rejection_mean = 0.5 / static_cast<double>(i + 1);
    curve[i].baseline_rate = std::pow(0.1, static_cast<double>(i + 1));
  }
  const auto fits = fit_simulation(curve);
  ASSERT_TRUE(fits.baseline);
  EXPECT_NEAR(fits.baseline->decay_rate, std::log(0.1), 1e-12);
  const auto j = simulation_summary_json(curve, fits, 0.005);
  EXPECT_EQ(j.at("first_k_below_baseline"), 3);
  EXPECT_TRUE(j.at("first_k_below_simulated").is_null());
}

}  // namespace
}  // namespace monoaudit
