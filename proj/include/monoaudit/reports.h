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

#ifndef MONOAUDIT_REPORTS_H_
#define MONOAUDIT_REPORTS_H_

#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "monoaudit/adverse_impact.h"
#include "monoaudit/counterfactual.h"
#include "monoaudit/dataset.h"
#include "monoaudit/homogenization.h"
#include "monoaudit/stats.h"

// Report files. Machine-readable CSVs carry exact (round-trip) numbers;
// the table-shaped summaries carry 4 decimals.
namespace monoaudit {

void write_k_distribution(std::ostream& out, std::span<const KDistributionRow> rows);

void write_position_stats(std::ostream& out, std::span<const GroupPositionStats> stats);
std::vector<GroupPositionStats> read_position_stats(std::istream& in);

// soc_group, group, impact_ratio, positions, n_adverse, pct_adverse,
// pct_adverse_bh.
void write_soc_rollup(std::ostream& out, std::span<const SocRollupRow> rows);

nlohmann::json impact_summary_json(const ImpactSummary& summary,
                                   std::span<const GroupPositionStats> stats,
                                   const AuditOptions& options);

// One row per (k, t): k, n_applicants, t, observed_count, observed, baseline.
void write_distributions(std::ostream& out,
                         std::span<const OutcomeDistribution> distributions);
// k, n_applicants, observed, baseline, observed_fit, baseline_fit.
void write_rejection_curve(std::ostream& out, const RejectionCurve& curve);
// k, count, baseline, observed as fractions.
void write_rejection_table(std::ostream& out, std::span<const RejectionPoint> points);
// Reads the k, count, baseline, observed layout. Cells ending in '%' are
// percentages, anything else a fraction.
std::vector<RejectionPoint> read_rejection_table(std::istream& in);

nlohmann::json homogenization_json(const HomogenizationReport& report);
nlohmann::json rejection_fit_json(const RejectionCurve& curve,
                                  const std::optional<GofResult>& gof);

struct SimulationFits {
  std::optional<ExpFit> simulated;
  std::optional<ExpFit> baseline;
};

// Fits over the positive simulated and baseline rates, when there are enough.
SimulationFits fit_simulation(std::span<const SimulationResult> curve);

// k, n_retained, simulated, ci_low, ci_high, baseline, simulated_fit,
// baseline_fit.
void write_simulation_csv(std::ostream& out, std::span<const SimulationResult> curve,
                          const SimulationFits& fits);
// Array with one SimulationResult per k.
nlohmann::json simulation_json(std::span<const SimulationResult> curve);
// Fits and the first k at which each curve drops below `threshold`.
nlohmann::json simulation_summary_json(std::span<const SimulationResult> curve,
                                       const SimulationFits& fits, double threshold);

// Two-space indented JSON with a trailing newline.
std::string dump_json(const nlohmann::json& j);

// Writes `content` to `path`, creating parent directories.
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace monoaudit

#endif  // MONOAUDIT_REPORTS_H_
