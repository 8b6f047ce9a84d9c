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

#ifndef MONOAUDIT_CONFIG_H_
#define MONOAUDIT_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "monoaudit/adverse_impact.h"
#include "monoaudit/counterfactual.h"
#include "monoaudit/dataset.h"
#include "monoaudit/homogenization.h"

namespace monoaudit {

inline constexpr const char* kOutputDirEnv = "MONOAUDIT_OUTPUT_DIR";

// Settings shared by every subcommand. Loaded from an optional JSON file;
// command-line flags override individual fields.
struct RunConfig {
  std::string subcommand;
  std::vector<std::filesystem::path> inputs;
  std::filesystem::path output_dir = ".";

  ColumnMapping schema;
  double threshold = kDefaultThreshold;
  std::vector<std::string> dedup_key = {"applicant_id", "model_id", "position_id"};
  std::vector<std::string> identity_key;  // empty: keep applicant ids
  std::set<std::string> test_models;
  std::map<std::string, std::string> employer_merge;

  double alpha = 0.05;
  double four_fifths = 0.8;
  double z_threshold = 1.96;
  std::size_t min_reporting = 30;
  std::size_t min_group_n = 1;
  std::vector<std::string> group_attribute = {"race"};
  std::vector<std::string> groups;

  std::size_t k_min = 1;
  std::size_t k_max = 0;  // 0: largest k present
  std::size_t min_cohort = 50;
  double min_expected = kDefaultMinExpected;

  std::size_t replicates = kDefaultReplicates;
  std::uint64_t seed = 1;
  // Systemic rejection level whose first crossing the simulation reports.
  double crossing = 0.001;

  // Throws ConfigError listing every invalid field.
  void validate() const;

  CleanOptions clean_options() const;
  AuditOptions audit_options() const;
  HomogenizationOptions homogenization_options() const;

  nlohmann::json to_json() const;
  // Unknown keys are an error; absent keys keep their defaults.
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::filesystem::path& path);
};

}  // namespace monoaudit

#endif  // MONOAUDIT_CONFIG_H_
