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

#ifndef MONOAUDIT_DATASET_H_
#define MONOAUDIT_DATASET_H_

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace monoaudit {

using Timestamp = std::chrono::sys_seconds;

// Accepts "YYYY-MM-DDTHH:MM:SS" with an optional trailing "Z"; a space may
// replace the "T". Interpreted as UTC.
std::optional<Timestamp> parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp t);

// One screening event: an applicant's application to a position, scored by
// the model serving that position.
struct ApplicationRecord {
  std::string application_id;
  std::string applicant_id;
  std::string position_id;
  std::string employer_id;
  std::string model_id;
  std::optional<double> score;
  Timestamp submitted_at{};
  std::optional<std::string> race;
  std::optional<std::string> gender;
  std::optional<std::string> soc_major_group;
  std::map<std::string, std::string> extra;
  // Set by binarize().
  std::optional<bool> recommended;

  bool operator==(const ApplicationRecord&) const = default;
};

// Canonical column names, in file order.
const std::vector<std::string>& canonical_columns();
bool is_canonical_column(std::string_view column);

// Value of a canonical field or an extra column, as text. Missing optional
// fields and absent extra keys yield std::nullopt.
std::optional<std::string> field_value(const ApplicationRecord& record,
                                       std::string_view column);

// Maps canonical column names to the header names used by an input file.
// Unmapped canonical columns are looked up under their own name. Header
// columns that are not mapped to a canonical field land in `extra`.
struct ColumnMapping {
  std::map<std::string, std::string> columns;

  std::string source(std::string_view canonical) const;
  static ColumnMapping from_json(const nlohmann::json& j);
};

std::vector<ApplicationRecord> load_dataset(const std::filesystem::path& path,
                                            const ColumnMapping& schema = {});
std::vector<ApplicationRecord> parse_dataset(std::istream& in,
                                             const ColumnMapping& schema = {});

// Writes the canonical schema followed by the sorted union of extra columns,
// and a trailing `recommended` column when any record carries an outcome.
void write_dataset(std::ostream& out,
                   std::span<const ApplicationRecord> records);
void write_dataset(const std::filesystem::path& path,
                   std::span<const ApplicationRecord> records);

struct CleanOptions {
  std::set<std::string> test_model_ids;
  std::vector<std::string> dedup_key = {"applicant_id", "model_id",
                                        "position_id"};
  // Employer aliases; chains are followed to their terminal id.
  std::map<std::string, std::string> employer_merge_map;
};

struct CleanReport {
  std::size_t rows_in = 0;
  std::size_t rows_out = 0;
  std::size_t removed_test_models = 0;
  std::size_t removed_unscored = 0;
  std::size_t deduplicated = 0;
  // Records whose employer id was rewritten.
  std::size_t merged_employer_ids = 0;

  nlohmann::json to_json() const;
  bool operator==(const CleanReport&) const = default;
};

struct CleanResult {
  std::vector<ApplicationRecord> records;
  CleanReport report;
};

// Removes test-model rows, then unscored rows, then duplicates on the dedup
// key (earliest submitted_at wins, then smallest application_id; repeated
// application ids are duplicates too), then remaps employer ids. Output is
// sorted by application_id.
CleanResult clean(std::vector<ApplicationRecord> records,
                  const CleanOptions& options = {});

inline constexpr double kDefaultThreshold = 0.5;

// recommended = score > threshold. A score exactly at the threshold is not
// recommended.
std::vector<ApplicationRecord> binarize(std::vector<ApplicationRecord> records,
                                        double threshold = kDefaultThreshold);

struct IdentityKey {
  std::vector<std::string> key_columns;
};

inline constexpr std::string_view kOriginalApplicantColumn =
    "original_applicant_id";

// Rewrites applicant_id to a stable hash of the key tuple so that rows equal
// on every key column share an applicant. The previous id is kept in
// extra["original_applicant_id"].
std::vector<ApplicationRecord> group_identities(
    std::vector<ApplicationRecord> records, const IdentityKey& key);

struct ApplicantHistory {
  std::string applicant_id;
  // Indices into the record span passed to stratify_by_k, ascending.
  std::vector<std::size_t> records;
};

// k -> applicants with exactly k applications, sorted by applicant id.
using Cohorts = std::map<std::size_t, std::vector<ApplicantHistory>>;

Cohorts stratify_by_k(std::span<const ApplicationRecord> records);

struct KDistributionRow {
  std::size_t k = 0;  // lower bound of the bucket when `open_ended`
  bool open_ended = false;
  std::size_t count = 0;
  double percent = 0.0;
};

// Applicant counts by number of applications. When `top_bucket` > 0 every
// k >= top_bucket is folded into one "top_bucket+" row.
std::vector<KDistributionRow> k_distribution(const Cohorts& cohorts,
                                             std::size_t top_bucket = 0);

}  // namespace monoaudit

#endif  // MONOAUDIT_DATASET_H_
