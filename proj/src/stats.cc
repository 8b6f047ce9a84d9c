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

#include "monoaudit/stats.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "monoaudit/errors.h"

namespace monoaudit {
namespace {

void check_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("probability " + std::to_string(p) +
                                " outside [0,1]");
  }
}

}  // namespace

PoissonBinomialPMF poisson_binomial(std::span<const double> probs) {
  for (double p : probs) check_probability(p);
  std::vector<double> pmf(probs.size() + 1, 0.0);
  pmf[0] = 1.0;
  // After trial j, pmf[0..j] holds the distribution of the first j trials.
  for (std::size_t j = 0; j < probs.size(); ++j) {
    const double p = probs[j];
    const double q = 1.0 - p;
    pmf[j + 1] = pmf[j] * p;
    for (std::size_t t = j; t > 0; --t) {
      pmf[t] = std::fma(pmf[t - 1], p, pmf[t] * q);
    }
    pmf[0] *= q;
  }
  return {std::vector<double>(probs.begin(), probs.end()), std::move(pmf)};
}

std::vector<double> poisson_binomial_dft(std::span<const double> probs) {
  for (double p : probs) check_probability(p);
  const std::size_t n = probs.size();
  const double omega = 2.0 * std::numbers::pi / static_cast<double>(n + 1);
  // chi[l] = prod_m (1 - p_m + p_m e^{i omega l}), the characteristic
  // function sampled at the (n+1)-th roots of unity.
  std::vector<std::complex<double>> chi(n + 1);
  for (std::size_t l = 0; l <= n; ++l) {
    const std::complex<double> w = std::polar(1.0, omega * static_cast<double>(l));
    std::complex<double> prod = 1.0;
    for (double p : probs) prod *= (1.0 - p) + p * w;
    chi[l] = prod;
  }
  std::vector<double> pmf(n + 1);
  for (std::size_t t = 0; t <= n; ++t) {
    std::complex<double> sum = 0.0;
    for (std::size_t l = 0; l <= n; ++l) {
      const double angle =
          -omega * static_cast<double>((l * t) % (n + 1));
      sum += chi[l] * std::polar(1.0, angle);
    }
    pmf[t] = std::max(0.0, sum.real() / static_cast<double>(n + 1));
  }
  return pmf;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("normal_quantile needs p in (0,1)");
  }
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double chi_square_sf(double x, double dof) {
  if (dof <= 0) throw std::invalid_argument("chi-square dof must be positive");
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return boost::math::gamma_q(dof / 2.0, x / 2.0);
}

double ZTestResult::p_value_two_sided() const {
  return std::min(1.0, 2.0 * normal_cdf(-std::abs(z)));
}

ZTestResult pooled_z_test(double s_g, std::size_t n_g, double s_ref,
                          std::size_t n_ref) {
  if (n_g == 0 || n_ref == 0) {
    throw std::invalid_argument("z-test needs at least one applicant per group");
  }
  check_probability(s_g);
  check_probability(s_ref);
  ZTestResult r;
  r.s_g = s_g;
  r.s_ref = s_ref;
  r.n_g = n_g;
  r.n_ref = n_ref;
  const double ng = static_cast<double>(n_g);
  const double nr = static_cast<double>(n_ref);
  r.pooled_p = (s_g * ng + s_ref * nr) / (ng + nr);
  const double variance = r.pooled_p * (1.0 - r.pooled_p) * (1.0 / ng + 1.0 / nr);
  if (!(variance > 0.0)) {
    r.degenerate = true;
    r.z = 0.0;
    r.p_value_one_sided = 0.5;
    return r;
  }
  r.z = (s_g - s_ref) / std::sqrt(variance);
  r.p_value_one_sided = normal_cdf(r.z);
  return r;
}

std::size_t BHResult::num_rejected() const {
  return static_cast<std::size_t>(std::count(rejected.begin(), rejected.end(), true));
}

BHResult benjamini_hochberg(std::span<const double> p_values, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("alpha must lie in (0,1)");
  }
  for (double p : p_values) check_probability(p);
  BHResult r;
  r.p_values.assign(p_values.begin(), p_values.end());
  r.alpha = alpha;
  r.rejected.assign(p_values.size(), false);
  const std::size_t m = p_values.size();
  if (m == 0) return r;

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return p_values[a] < p_values[b];
  });
  for (std::size_t i = m; i > 0; --i) {
    // p_(i) <= i * alpha / m, compared without division.
    if (p_values[order[i - 1]] * static_cast<double>(m) <=
        static_cast<double>(i) * alpha) {
      r.threshold_index = static_cast<std::ptrdiff_t>(i - 1);
      break;
    }
  }
  for (std::ptrdiff_t i = 0; i <= r.threshold_index; ++i) {
    r.rejected[order[static_cast<std::size_t>(i)]] = true;
  }
  return r;
}

nlohmann::json GofResult::to_json() const {
  return {{"chi2", chi2}, {"dof", dof}, {"p_value", p_value},
          {"merged_bins", merged_bins}};
}

GofResult chi_square_gof(std::span<const double> observed_counts,
                         std::span<const double> expected_probs,
                         double n_total, double min_expected) {
  if (observed_counts.size() != expected_probs.size()) {
    throw std::invalid_argument("observed and expected bin counts differ");
  }
  if (!(n_total > 0.0)) throw std::invalid_argument("n_total must be positive");
  double obs_sum = 0.0;
  double prob_sum = 0.0;
  for (std::size_t i = 0; i < observed_counts.size(); ++i) {
    if (observed_counts[i] < 0.0) throw std::invalid_argument("negative count");
    check_probability(expected_probs[i]);
    obs_sum += observed_counts[i];
    prob_sum += expected_probs[i];
  }
  if (std::abs(obs_sum - n_total) > 1e-6 * std::max(1.0, n_total)) {
    throw std::invalid_argument("observed counts do not sum to n_total");
  }
  if (std::abs(prob_sum - 1.0) > 1e-9) {
    throw std::invalid_argument("expected probabilities do not sum to 1");
  }

  struct Bin {
    double observed = 0.0;
    double expected = 0.0;
  };
  std::vector<Bin> bins;
  if (min_expected > 0.0) {
    Bin open;
    bool has_open = false;
    for (std::size_t i = 0; i < observed_counts.size(); ++i) {
      open.observed += observed_counts[i];
      open.expected += expected_probs[i] * n_total;
      has_open = true;
      if (open.expected >= min_expected) {
        bins.push_back(open);
        open = {};
        has_open = false;
      }
    }
    if (has_open) {
      if (bins.empty()) {
        bins.push_back(open);
      } else {
        bins.back().observed += open.observed;
        bins.back().expected += open.expected;
      }
    }
  } else {
    for (std::size_t i = 0; i < observed_counts.size(); ++i) {
      const double e = expected_probs[i] * n_total;
      // An empty bin with nothing expected carries no information.
      if (e == 0.0 && observed_counts[i] == 0.0) continue;
      bins.push_back({observed_counts[i], e});
    }
  }
  if (bins.size() < 2) {
    throw InsufficientData("chi-square test needs at least two bins, have " +
                           std::to_string(bins.size()));
  }

  GofResult r;
  r.merged_bins = observed_counts.size() - bins.size();
  r.dof = bins.size() - 1;
  for (const auto& b : bins) {
    const double diff = b.observed - b.expected;
    if (b.expected == 0.0) {
      r.chi2 = std::numeric_limits<double>::infinity();
      break;
    }
    r.chi2 += diff * diff / b.expected;
  }
  r.p_value = chi_square_sf(r.chi2, static_cast<double>(r.dof));
  return r;
}

double ExpFit::predict(double k) const {
  return std::exp(log_intercept + decay_rate * k);
}

nlohmann::json ExpFit::to_json() const {
  return {{"log_intercept", log_intercept}, {"decay_rate", decay_rate},
          {"r_squared", r_squared},         {"points_used", points_used},
          {"points_dropped", points_dropped}, {"degenerate", degenerate}};
}

ExpFit fit_exponential(std::span<const double> k_values,
                       std::span<const double> rates) {
  if (k_values.size() != rates.size()) {
    throw std::invalid_argument("k_values and rates differ in length");
  }
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (rates[i] > 0.0) {
      xs.push_back(k_values[i]);
      ys.push_back(std::log(rates[i]));
    }
  }
  ExpFit fit;
  fit.points_used = xs.size();
  fit.points_dropped = rates.size() - xs.size();
  if (xs.size() < 2) {
    throw InsufficientData("exponential fit needs two points with rate > 0");
  }
  const double n = static_cast<double>(xs.size());
  const double x_mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double y_mean = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - x_mean;
    const double dy = ys[i] - y_mean;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw InsufficientData("exponential fit needs two distinct k");

  const auto [y_min, y_max] = std::minmax_element(ys.begin(), ys.end());
  if (*y_min == *y_max) {
    fit.degenerate = true;
    fit.decay_rate = 0.0;
    fit.log_intercept = *y_min;
    fit.r_squared = 0.0;
    return fit;
  }
  fit.decay_rate = sxy / sxx;
  fit.log_intercept = y_mean - fit.decay_rate * x_mean;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double resid = ys[i] - (fit.log_intercept + fit.decay_rate * xs[i]);
    ss_res += resid * resid;
  }
  fit.r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  return fit;
}

std::optional<GofResult> combine_gof(std::span<const GofResult> parts) {
  if (parts.empty()) return std::nullopt;
  GofResult total;
  for (const auto& g : parts) {
    total.chi2 += g.chi2;
    total.dof += g.dof;
    total.merged_bins += g.merged_bins;
  }
  total.p_value = chi_square_sf(total.chi2, static_cast<double>(total.dof));
  return total;
}

}  // namespace monoaudit
