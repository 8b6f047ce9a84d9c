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

#ifndef MONOAUDIT_HOMOGENIZATION_H_
#define MONOAUDIT_HOMOGENIZATION_H_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "monoaudit/dataset.h"
#include "monoaudit/stats.h"

namespace monoaudit {

struct PositionRate {
  std::size_t n = 0;
  std::size_t selected = 0;

  double rate() const {
    return n == 0 ? 0.0 : static_cast<double>(selected) / static_cast<double>(n);
  }
};

using SelectionRates = std::map<std::string, PositionRate>;

// Selection rate of every position over all of its applications.
SelectionRates position_selection_rates(std::span<const ApplicationRecord> records);

// Share of cohort applicants receiving t = 0..k recommendations. Every
// applicant must have exactly k binarized applications.
std::vector<double> observed_distribution(std::span<const ApplicantHistory> cohort,
                                          std::span<const ApplicationRecord> records,
                                          std::size_t k);

// Cohort average of each applicant's Poisson-binomial distribution over the
// selection rates of the positions they applied to. A repeat application to
// one position contributes that position's rate twice.
std::vector<double> baseline_distribution(std::span<const ApplicantHistory> cohort,
                                          std::span<const ApplicationRecord> records,
                                          const SelectionRates& rates,
                                          std::size_t k);

struct OutcomeDistribution {
  std::size_t k = 0;
  std::size_t n_applicants = 0;
  std::vector<std::size_t> observed_counts;
  std::vector<double> observed;
  std::vector<double> baseline;

  double systemic_rejection_observed() const { return observed.at(0); }
  double systemic_rejection_baseline() const { return baseline.at(0); }
};

OutcomeDistribution outcome_distribution(std::span<const ApplicantHistory> cohort,
                                         std::span<const ApplicationRecord> records,
                                         const SelectionRates& rates,
                                         std::size_t k);

// Chi-square test of the observed counts (observed * n) against the baseline.
GofResult compare(std::span<const double> observed, std::span<const double> baseline,
                  std::size_t n, double min_expected = kDefaultMinExpected);
GofResult compare(const OutcomeDistribution& dist,
                  double min_expected = kDefaultMinExpected);

struct RejectionPoint {
  std::size_t k = 0;
  double observed_rate = 0.0;
  double baseline_rate = 0.0;
  std::size_t n_applicants = 0;
};

struct RejectionCurve {
  std::vector<RejectionPoint> points;  // ascending k
  // Absent when fewer than two points have a positive rate.
  std::optional<ExpFit> observed_fit;
  std::optional<ExpFit> baseline_fit;
};

// Systemic rejection (zero recommendations) per k for cohorts with at least
// `min_cohort` applicants, with exponential fits of both series.
RejectionCurve rejection_curve(std::span<const OutcomeDistribution> distributions,
                               std::size_t min_cohort = 50);
RejectionCurve rejection_curve_from_points(std::vector<RejectionPoint> points);

// Joint test that observed systemic rejection matches the baseline at every
// k: each stratum contributes a two-cell (rejected everywhere / not)
// chi-square with one degree of freedom. Adjacent strata are pooled in k
// order until both expected cells reach min_expected.
GofResult compare_rejection_rates(std::span<const RejectionPoint> points,
                                  double min_expected = kDefaultMinExpected);

struct HomogenizationOptions {
  std::size_t k_min = 1;
  std::size_t k_max = 0;  // 0: no upper bound
  std::size_t min_cohort = 50;
  double min_expected = kDefaultMinExpected;
};

struct HomogenizationReport {
  std::vector<OutcomeDistribution> distributions;
  // Per-k full-distribution tests, aligned with `distributions`; empty when a
  // cohort is too small to test.
  std::vector<std::optional<GofResult>> distribution_gof;
  // All per-k tests pooled into one statistic.
  std::optional<GofResult> joint_gof;
  RejectionCurve curve;
  std::optional<GofResult> rejection_gof;
  // k values in [k_min, k_max] with no applicants, or below min_cohort.
  std::vector<std::size_t> omitted_k;
};

// Full pipeline over cleaned, binarized records.
HomogenizationReport analyze_homogenization(std::span<const ApplicationRecord> records,
                                            const HomogenizationOptions& options = {});

}  // namespace monoaudit

#endif  // MONOAUDIT_HOMOGENIZATION_H_
