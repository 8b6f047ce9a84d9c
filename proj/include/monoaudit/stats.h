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

#ifndef MONOAUDIT_STATS_H_
#define MONOAUDIT_STATS_H_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"

namespace monoaudit {

// Distribution of the number of successes among independent Bernoulli trials
// with (possibly different) success probabilities.
struct PoissonBinomialPMF {
  std::vector<double> probs;
  std::vector<double> pmf;  // size probs.size() + 1
};

// Exact PMF by adding one trial at a time: O(k^2), linear space. Throws
// std::invalid_argument when a probability lies outside [0,1].
PoissonBinomialPMF poisson_binomial(std::span<const double> probs);

// Same distribution through the discrete Fourier transform of the
// characteristic function. Kept as an independent second route; agrees with
// poisson_binomial() to ~1e-12 for k in the low thousands.
std::vector<double> poisson_binomial_dft(std::span<const double> probs);

double normal_cdf(double z);
double normal_quantile(double p);
// Upper tail of the chi-square distribution with `dof` degrees of freedom.
double chi_square_sf(double x, double dof);

struct ZTestResult {
  double s_g = 0.0;
  double s_ref = 0.0;
  std::size_t n_g = 0;
  std::size_t n_ref = 0;
  double pooled_p = 0.0;
  double z = 0.0;
  // P(Z <= z): small when the group is under-selected.
  double p_value_one_sided = 0.5;
  // Pooled variance was zero (both rates 0 or both 1); z is reported as 0.
  bool degenerate = false;

  double p_value_two_sided() const;
};

// Two-sample pooled-proportion z-test of s_g against s_ref.
ZTestResult pooled_z_test(double s_g, std::size_t n_g, double s_ref,
                          std::size_t n_ref);

struct BHResult {
  std::vector<double> p_values;
  double alpha = 0.05;
  std::vector<bool> rejected;  // indexed like p_values
  // Position, in ascending p-value order, of the largest rejected p-value;
  // -1 when nothing is rejected.
  std::ptrdiff_t threshold_index = -1;

  std::size_t num_rejected() const;
};

// Benjamini-Hochberg step-up procedure at FDR level alpha.
BHResult benjamini_hochberg(std::span<const double> p_values, double alpha);

struct GofResult {
  double chi2 = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
  std::size_t merged_bins = 0;

  nlohmann::json to_json() const;
};

inline constexpr double kDefaultMinExpected = 5.0;

// Pearson chi-square goodness of fit of observed counts against expected
// probabilities. Adjacent bins are merged left to right until every merged
// bin has expected count >= min_expected (a short tail is folded into its
// left neighbour). min_expected <= 0 disables merging. Throws
// InsufficientData when fewer than two bins remain.
GofResult chi_square_gof(std::span<const double> observed_counts,
                         std::span<const double> expected_probs,
                         double n_total,
                         double min_expected = kDefaultMinExpected);

// Sum of independent chi-square statistics and their degrees of freedom.
// std::nullopt when `parts` is empty.
std::optional<GofResult> combine_gof(std::span<const GofResult> parts);

struct ExpFit {
  double log_intercept = 0.0;
  double decay_rate = 0.0;
  double r_squared = 0.0;
  std::size_t points_used = 0;
  std::size_t points_dropped = 0;
  // Log rates were constant, so r_squared is undefined and reported as 0.
  bool degenerate = false;

  double predict(double k) const;
  nlohmann::json to_json() const;
};

// Least squares fit of ln(rate) = log_intercept + decay_rate * k. Points with
// rate <= 0 are dropped. Throws InsufficientData with fewer than two usable
// points or when all usable k coincide.
ExpFit fit_exponential(std::span<const double> k_values,
                       std::span<const double> rates);

}  // namespace monoaudit

#endif  // MONOAUDIT_STATS_H_
