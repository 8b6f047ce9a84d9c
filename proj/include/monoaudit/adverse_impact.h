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

#ifndef MONOAUDIT_ADVERSE_IMPACT_H_
#define MONOAUDIT_ADVERSE_IMPACT_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "monoaudit/dataset.h"

namespace monoaudit {

// Which column(s) define the demographic group of a record. Several columns
// form an intersectional label joined by a space ("Female Asian"). A record
// with any of the columns missing has no group and is left out of every
// adverse-impact denominator.
struct GroupingAttribute {
  std::vector<std::string> columns = {"race"};

  std::optional<std::string> label_of(const ApplicationRecord& record) const;
};

enum class AdverseFlag { kRaw, kBenjaminiHochberg };

struct AuditOptions {
  GroupingAttribute attribute;
  // Groups to audit. Empty means every label observed in the data. The
  // reference group is chosen among these groups only.
  std::vector<std::string> groups;
  double alpha = 0.05;
  double four_fifths = 0.8;
  double z_threshold = 1.96;
  // Distinct applicants with a group label needed for a position to be
  // audited.
  std::size_t min_reporting = 30;
  // Applications a group needs within a position to be audited there.
  std::size_t min_group_n = 1;
};

struct GroupCounts {
  std::string group;
  std::size_t n = 0;
  std::size_t selected = 0;

  double rate() const {
    return n == 0 ? 0.0 : static_cast<double>(selected) / static_cast<double>(n);
  }
};

// Positions with at least `min_reporting` distinct applicants carrying a
// group label, sorted by id.
std::vector<std::string> position_filter(
    std::span<const ApplicationRecord> records,
    const GroupingAttribute& attribute, std::size_t min_reporting = 30);

// Highest selection rate among groups with n >= min_group_n. Ties go to the
// larger group, then to the lexicographically smaller label. Throws
// InsufficientData when no group qualifies.
std::string reference_group(std::span<const GroupCounts> groups,
                            std::size_t min_group_n = 1);

struct GroupPositionStats {
  std::string position_id;
  std::string group;
  std::size_t n = 0;
  std::size_t selected = 0;
  double selection_rate = 0.0;
  std::string reference_group;
  std::size_t reference_n = 0;
  std::size_t reference_selected = 0;
  double reference_rate = 0.0;
  double impact_ratio = 1.0;
  double z = 0.0;
  // Two-sided, so that |z| >= 1.96 and p <= 0.05 coincide.
  double p_value = 1.0;
  bool degenerate = false;
  bool flag_practical = false;
  bool flag_statistical = false;
  bool flag_adverse_raw = false;
  bool flag_adverse_bh = false;

  bool flagged(AdverseFlag which) const {
    return which == AdverseFlag::kRaw ? flag_adverse_raw : flag_adverse_bh;
  }
};

// Per-position adverse-impact statistics for every eligible position and
// every audited group present there with n >= min_group_n, sorted by
// (position_id, group). The reference group's own row has ratio 1 and z 0.
// Benjamini-Hochberg runs once per group over all of that group's rows.
// Records must be binarized.
std::vector<GroupPositionStats> audit_positions(
    std::span<const ApplicationRecord> records, const AuditOptions& options);

// Recommendations the group would gain on flagged positions at the
// reference group's rate: sum of max(0, round(n_g * s_ref) - selected_g),
// rounding halves up.
std::size_t shortfall(std::span<const GroupPositionStats> stats,
                      std::string_view group,
                      AdverseFlag which = AdverseFlag::kBenjaminiHochberg);

struct ImpactSummaryRow {
  std::string group;
  // Micro averages over the audited positions.
  double aggregate_selection_rate = 0.0;
  double aggregate_impact_ratio = 0.0;
  std::size_t positions = 0;
  std::size_t biased_positions = 0;
  double biased_positions_pct = 0.0;
  std::size_t applications_to_biased = 0;
  std::size_t applications_total = 0;
  double applications_to_biased_pct = 0.0;
  std::size_t applicants_to_biased = 0;
  std::size_t applicants_total = 0;
  double applicants_to_biased_pct = 0.0;
  std::size_t shortfall = 0;
  double shortfall_pct = 0.0;
};

// All audited positions pooled into one, the way a vendor-wide audit would
// look at them.
struct PooledAggregateRow {
  std::string group;
  std::size_t n = 0;
  std::size_t selected = 0;
  double selection_rate = 0.0;
  std::string reference_group;
  double impact_ratio = 1.0;
  double z = 0.0;
  bool flag_adverse = false;
};

struct SocRollupRow {
  std::string soc_group;
  std::string group;
  double impact_ratio = 1.0;
  std::size_t positions = 0;
  std::size_t n_adverse = 0;
  double pct_adverse = 0.0;
  std::size_t n_adverse_bh = 0;
  double pct_adverse_bh = 0.0;
};

inline constexpr std::string_view kNoSocCode = "No SOC Code";
inline constexpr std::string_view kAllSoc = "All";

struct ImpactSummary {
  std::vector<ImpactSummaryRow> groups;
  std::vector<PooledAggregateRow> pooled;
  std::vector<SocRollupRow> soc_rollup;
};

// Group-level rollups of audit_positions() output. "Biased" counts and the
// shortfall use `which` (BH by default); SOC rows report both. SOC rows are
// ordered by SOC label, then "No SOC Code", then "All"; groups sort within.
ImpactSummary summarize(std::span<const GroupPositionStats> stats,
                        std::span<const ApplicationRecord> records,
                        const AuditOptions& options,
                        AdverseFlag which = AdverseFlag::kBenjaminiHochberg);

}  // namespace monoaudit

#endif  // MONOAUDIT_ADVERSE_IMPACT_H_
