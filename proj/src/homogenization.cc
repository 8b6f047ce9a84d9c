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

#include "monoaudit/homogenization.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "monoaudit/errors.h"

namespace monoaudit {
namespace {

void check_history(const ApplicantHistory& a,
                   std::span<const ApplicationRecord> records, std::size_t k) {
  if (a.records.size() != k) {
    throw DataError("applicant " + a.applicant_id + " has " +
                    std::to_string(a.records.size()) + " applications, expected " +
                    std::to_string(k));
  }
  for (auto idx : a.records) {
    if (idx >= records.size()) throw std::out_of_range("record index out of range");
  }
}

}  // namespace

SelectionRates position_selection_rates(std::span<const ApplicationRecord> records) {
  SelectionRates rates;
  for (const auto& r : records) {
    if (!r.recommended) {
      throw DataError("application " + r.application_id + " is not binarized");
    }
    auto& p = rates[r.position_id];
    ++p.n;
    if (*r.recommended) ++p.selected;
  }
  return rates;
}

std::vector<double> observed_distribution(std::span<const ApplicantHistory> cohort,
                                          std::span<const ApplicationRecord> records,
                                          std::size_t k) {
  std::vector<double> hist(k + 1, 0.0);
  if (cohort.empty()) throw InsufficientData("empty cohort");
  for (const auto& a : cohort) {
    check_history(a, records, k);
    std::size_t t = 0;
    for (auto idx : a.records) {
      const auto& r = records[idx];
      if (!r.recommended) {
        throw DataError("application " + r.application_id + " is not binarized");
      }
      t += *r.recommended ? 1 : 0;
    }
    hist[t] += 1.0;
  }
  for (auto& h : hist) h /= static_cast<double>(cohort.size());
  return hist;
}

std::vector<double> baseline_distribution(std::span<const ApplicantHistory> cohort,
                                          std::span<const ApplicationRecord> records,
                                          const SelectionRates& rates,
                                          std::size_t k) {
  if (cohort.empty()) throw InsufficientData("empty cohort");
  std::vector<double> avg(k + 1, 0.0);
  std::vector<double> probs;
  for (const auto& a : cohort) {
    check_history(a, records, k);
    probs.clear();
    for (auto idx : a.records) {
      const auto it = rates.find(records[idx].position_id);
      if (it == rates.end() || it->second.n == 0) {
        throw DataError("position " + records[idx].position_id +
                        " has no applicants to estimate a selection rate");
      }
      probs.push_back(it->second.rate());
    }
    const auto pb = poisson_binomial(probs);
    for (std::size_t t = 0; t <= k; ++t) avg[t] += pb.pmf[t];
  }
  for (auto& v : avg) v /= static_cast<double>(cohort.size());
  return avg;
}

OutcomeDistribution outcome_distribution(std::span<const ApplicantHistory> cohort,
                                         std::span<const ApplicationRecord> records,
                                         const SelectionRates& rates,
                                         std::size_t k) {
  OutcomeDistribution d;
  d.k = k;
  d.n_applicants = cohort.size();
  d.observed = observed_distribution(cohort, records, k);
  d.baseline = baseline_distribution(cohort, records, rates, k);
  d.observed_counts.resize(k + 1);
  for (std::size_t t = 0; t <= k; ++t) {
    d.observed_counts[t] = static_cast<std::size_t>(
        std::llround(d.observed[t] * static_cast<double>(cohort.size())));
  }
  return d;
}

GofResult compare(std::span<const double> observed, std::span<const double> baseline,
                  std::size_t n, double min_expected) {
  if (observed.size() != baseline.size()) {
    throw std::invalid_argument("observed and baseline cover different k");
  }
  std::vector<double> counts(observed.size());
  for (std::size_t t = 0; t < observed.size(); ++t) {
    counts[t] = std::round(observed[t] * static_cast<double>(n));
  }
  // Renormalise away accumulated rounding in the averaged baseline.
  std::vector<double> probs(baseline.begin(), baseline.end());
  double total = 0.0;
  for (double p : probs) total += p;
  for (double& p : probs) p /= total;
  return chi_square_gof(counts, probs, static_cast<double>(n), min_expected);
}

GofResult compare(const OutcomeDistribution& dist, double min_expected) {
  return compare(dist.observed, dist.baseline, dist.n_applicants, min_expected);
}

RejectionCurve rejection_curve_from_points(std::vector<RejectionPoint> points) {
  RejectionCurve curve;
  std::sort(points.begin(), points.end(),
            [](const auto& a, const auto& b) { return a.k < b.k; });
  curve.points = std::move(points);
  std::vector<double> ks;
  std::vector<double> obs;
  std::vector<double> base;
  for (const auto& p : curve.points) {
    ks.push_back(static_cast<double>(p.k));
    obs.push_back(p.observed_rate);
    base.push_back(p.baseline_rate);
  }
  try {
    curve.observed_fit = fit_exponential(ks, obs);
  } catch (const InsufficientData&) {
  }
  try {
    curve.baseline_fit = fit_exponential(ks, base);
  } catch (const InsufficientData&) {
  }
  return curve;
}

RejectionCurve rejection_curve(std::span<const OutcomeDistribution> distributions,
                               std::size_t min_cohort) {
  std::vector<RejectionPoint> points;
  for (const auto& d : distributions) {
    if (d.n_applicants < min_cohort || d.n_applicants == 0) continue;
    points.push_back({d.k, d.systemic_rejection_observed(),
                      d.systemic_rejection_baseline(), d.n_applicants});
  }
  return rejection_curve_from_points(std::move(points));
}

GofResult compare_rejection_rates(std::span<const RejectionPoint> points,
                                  double min_expected) {
  struct Stratum {
    double n = 0.0;
    double observed_zero = 0.0;
    double expected_zero = 0.0;
  };
  std::vector<RejectionPoint> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.k < b.k; });

  std::vector<Stratum> strata;
  Stratum open;
  bool has_open = false;
  for (const auto& p : sorted) {
    if (p.n_applicants == 0) continue;
    if (!(p.baseline_rate >= 0.0 && p.baseline_rate <= 1.0) ||
        !(p.observed_rate >= 0.0 && p.observed_rate <= 1.0)) {
      throw std::invalid_argument("rejection rate outside [0,1]");
    }
    const double n = static_cast<double>(p.n_applicants);
    open.n += n;
    open.observed_zero += p.observed_rate * n;
    open.expected_zero += p.baseline_rate * n;
    has_open = true;
    if (min_expected <= 0.0 || (open.expected_zero >= min_expected &&
                                open.n - open.expected_zero >= min_expected)) {
      strata.push_back(open);
      open = {};
      has_open = false;
    }
  }
  if (has_open) {
    if (strata.empty()) {
      strata.push_back(open);
    } else {
      strata.back().n += open.n;
      strata.back().observed_zero += open.observed_zero;
      strata.back().expected_zero += open.expected_zero;
    }
  }
  if (strata.empty()) throw InsufficientData("no strata to compare");

  GofResult r;
  std::size_t nonempty = 0;
  for (const auto& p : sorted) nonempty += p.n_applicants > 0;
  r.merged_bins = nonempty - strata.size();
  r.dof = strata.size();
  for (const auto& s : strata) {
    const double cells[2][2] = {{s.observed_zero, s.expected_zero},
                                {s.n - s.observed_zero, s.n - s.expected_zero}};
    for (const auto& c : cells) {
      const double diff = c[0] - c[1];
      if (c[1] > 0.0) {
        r.chi2 += diff * diff / c[1];
      } else if (std::abs(diff) > 1e-9) {
        r.chi2 = std::numeric_limits<double>::infinity();
      }
    }
  }
  r.p_value = chi_square_sf(r.chi2, static_cast<double>(r.dof));
  return r;
}

HomogenizationReport analyze_homogenization(std::span<const ApplicationRecord> records,
                                            const HomogenizationOptions& options) {
  HomogenizationReport report;
  const auto rates = position_selection_rates(records);
  const auto cohorts = stratify_by_k(records);

  std::size_t k_max = options.k_max;
  if (k_max == 0 && !cohorts.empty()) k_max = cohorts.rbegin()->first;
  for (std::size_t k = std::max<std::size_t>(1, options.k_min); k <= k_max; ++k) {
    const auto it = cohorts.find(k);
    if (it == cohorts.end() || it->second.size() < options.min_cohort ||
        it->second.empty()) {
      report.omitted_k.push_back(k);
      continue;
    }
    auto dist = outcome_distribution(it->second, records, rates, k);
    std::optional<GofResult> gof;
    try {
      gof = compare(dist, options.min_expected);
    } catch (const InsufficientData&) {
    }
    report.distributions.push_back(std::move(dist));
    report.distribution_gof.push_back(gof);
  }
  std::vector<GofResult> tested;
  for (const auto& g : report.distribution_gof) {
    if (g) tested.push_back(*g);
  }
  report.joint_gof = combine_gof(tested);
  report.curve = rejection_curve(report.distributions, options.min_cohort);
  if (!report.curve.points.empty()) {
    report.rejection_gof =
        compare_rejection_rates(report.curve.points, options.min_expected);
  }
  return report;
}

}  // namespace monoaudit
