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

#include "monoaudit/config.h"

#include <fstream>

#include "monoaudit/errors.h"

namespace monoaudit {

void RunConfig::validate() const {
  std::vector<std::string> problems;
  if (!(threshold >= 0.0 && threshold <= 1.0)) problems.push_back("threshold must lie in [0,1]");
  if (!(alpha > 0.0 && alpha < 1.0)) problems.push_back("alpha must lie in (0,1)");
  if (!(four_fifths > 0.0 && four_fifths <= 1.0)) {
    problems.push_back("four_fifths must lie in (0,1]");
  }
  if (!(z_threshold >= 0.0)) problems.push_back("z_threshold must be non-negative");
  if (min_group_n == 0) problems.push_back("min_group_n must be positive");
  if (group_attribute.empty()) problems.push_back("group_attribute is empty");
  if (dedup_key.empty()) problems.push_back("dedup_key is empty");
  if (k_min == 0) problems.push_back("k_min must be positive");
  if (k_max != 0 && k_max < k_min) problems.push_back("k_max is below k_min");
  if (replicates == 0) problems.push_back("replicates must be positive");
  if (!(crossing > 0.0 && crossing < 1.0)) problems.push_back("crossing must lie in (0,1)");
  if (problems.empty()) return;
  std::string message = "invalid configuration:";
  for (const auto& p : problems) message += "\n  " + p;
  throw ConfigError(message);
}

CleanOptions RunConfig::clean_options() const {
  CleanOptions o;
  o.test_model_ids = test_models;
  o.dedup_key = dedup_key;
  o.employer_merge_map = employer_merge;
  return o;
}

AuditOptions RunConfig::audit_options() const {
  AuditOptions o;
  o.attribute.columns = group_attribute;
  o.groups = groups;
  o.alpha = alpha;
  o.four_fifths = four_fifths;
  o.z_threshold = z_threshold;
  o.min_reporting = min_reporting;
  o.min_group_n = min_group_n;
  return o;
}

HomogenizationOptions RunConfig::homogenization_options() const {
  HomogenizationOptions o;
  o.k_min = k_min;
  o.k_max = k_max;
  o.min_cohort = min_cohort;
  o.min_expected = min_expected;
  return o;
}

nlohmann::json RunConfig::to_json() const {
  return {{"schema", schema.columns},
          {"threshold", threshold},
          {"dedup_key", dedup_key},
          {"identity_key", identity_key},
          {"test_models", test_models},
          {"employer_merge", employer_merge},
          {"alpha", alpha},
          {"four_fifths", four_fifths},
          {"z_threshold", z_threshold},
          {"min_reporting", min_reporting},
          {"min_group_n", min_group_n},
          {"group_attribute", group_attribute},
          {"groups", groups},
          {"k_min", k_min},
          {"k_max", k_max},
          {"min_cohort", min_cohort},
          {"min_expected", min_expected},
          {"replicates", replicates},
          {"seed", seed},
          {"crossing", crossing},
          {"output_dir", output_dir.string()}};
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  RunConfig c;
  const nlohmann::json defaults = c.to_json();
  for (const auto& [key, _] : j.items()) {
    if (!defaults.contains(key)) throw ConfigError("unknown configuration key '" + key + "'");
  }
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) j.at(key).get_to(field);
    };
    if (j.contains("schema")) c.schema = ColumnMapping::from_json(j.at("schema"));
    get("threshold", c.threshold);
    get("dedup_key", c.dedup_key);
    get("identity_key", c.identity_key);
    get("test_models", c.test_models);
    get("employer_merge", c.employer_merge);
    get("alpha", c.alpha);
    get("four_fifths", c.four_fifths);
    get("z_threshold", c.z_threshold);
    get("min_reporting", c.min_reporting);
    get("min_group_n", c.min_group_n);
    get("group_attribute", c.group_attribute);
    get("groups", c.groups);
    get("k_min", c.k_min);
    get("k_max", c.k_max);
    get("min_cohort", c.min_cohort);
    get("min_expected", c.min_expected);
    get("replicates", c.replicates);
    get("seed", c.seed);
    get("crossing", c.crossing);
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("configuration: ") + e.what());
  }
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return from_json(j);
}

}  // namespace monoaudit
