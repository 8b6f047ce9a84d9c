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

#ifndef MONOAUDIT_SYNTHGEN_H_
#define MONOAUDIT_SYNTHGEN_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "monoaudit/dataset.h"

namespace monoaudit {

// Shift of one group's selection rate under one model, on the rate scale.
struct GroupEffect {
  std::string group;
  std::size_t model = 0;
  double offset = 0.0;
};

// Rows added on top of the clean corpus so that clean() and
// group_identities() have something known to find.
struct PlantedAnomalies {
  // Copies of existing rows with a later timestamp and a fresh application id.
  std::size_t duplicates = 0;
  // Extra models whose ids start with "test_", and how many rows they score.
  std::size_t test_models = 0;
  std::size_t test_model_rows = 0;
  // Copies of existing rows with the score removed.
  std::size_t unscored = 0;
  // Applicants whose rows each carry a different resume id; first_name and
  // last_name extras identify them again.
  std::size_t split_identities = 0;
  // Applicants rejected by every model, in the corpus and in the simulated
  // outcomes.
  std::size_t all_reject_applicants = 0;
};

struct SyntheticSpec {
  std::size_t n_applicants = 1000;
  std::size_t n_models = 20;
  std::size_t n_positions = 20;  // position p is served by model p % n_models
  std::size_t n_employers = 10;  // and belongs to employer p % n_employers
  std::map<std::size_t, double> k_distribution = {{1, 1.0}};
  double rho = 0.0;
  // Per-model marginal selection rates; empty means default_base_rate for all.
  std::vector<double> base_rates;
  double default_base_rate = 0.55;
  // Race labels; probability left over is an unlabelled applicant.
  std::map<std::string, double> group_mix;
  std::map<std::string, double> gender_mix;
  std::vector<GroupEffect> group_effects;
  // Cycled over positions; "" leaves a position without a code.
  std::vector<std::string> soc_groups;
  // Applicants scored by every model for the counterfactual simulation, and
  // how many of them get one outcome left blank.
  std::size_t sim_applicants = 0;
  std::size_t sim_incomplete = 0;
  // Applicants come in pairs with mirrored latent draws and identical
  // applications.
  bool antithetic = false;
  PlantedAnomalies planted;
  std::uint64_t seed = 1;

  double base_rate(std::size_t model) const;
  // Throws ConfigError listing every violated constraint.
  void validate() const;

  nlohmann::json to_json() const;
  static SyntheticSpec from_json(const nlohmann::json& j);
};

SyntheticSpec load_spec(const std::filesystem::path& path);

struct Calibration {
  // Probit intercept b_j of an unlabelled applicant under model j.
  std::vector<double> intercepts;
  // group -> model -> expected selection rate; "" is the unlabelled rate.
  std::map<std::string, std::vector<double>> group_rates;
};

// Solves for b_j so that the group mixture hits base_rate(j) exactly. Throws
// ConfigError when an offset pushes a group rate outside (0,1).
Calibration calibrate(const SyntheticSpec& spec);

struct GroundTruth {
  Calibration calibration;
  std::map<std::string, std::size_t> planned_k;  // applicant -> k
  std::map<std::size_t, std::size_t> k_histogram;
  std::map<std::string, double> latents;
  std::vector<std::string> duplicate_ids;
  std::vector<std::string> unscored_ids;
  std::vector<std::string> test_model_ids;
  std::size_t test_model_rows = 0;
  std::vector<std::string> all_reject_applicants;
  // Applicant -> number of resume ids it was split into.
  std::map<std::string, std::size_t> identity_groups;
  // (group, position) pairs whose expected impact ratio is below 0.8.
  std::vector<std::pair<std::string, std::string>> planted_adverse;
  std::vector<std::string> sim_applicants;

  nlohmann::json to_json() const;
};

struct SimScore {
  std::string applicant_id;
  std::string model_id;
  std::optional<double> score;
};

struct SyntheticCorpus {
  std::vector<ApplicationRecord> records;
  GroundTruth truth;
  std::vector<SimScore> sim_scores;
};

// Latent model: score = logistic(rho a_i + sqrt(1 - rho^2) e_ij + b_j +
// d_gj) with a_i, e_ij standard normal, so an application is recommended
// with probability Phi(b_j + d_gj). e_ij depends only on (seed, applicant,
// model): an applicant gets the same score from a model wherever it is used,
// including in the simulated outcomes.
SyntheticCorpus generate(const SyntheticSpec& spec);

// Sets group effects on the models serving `positions` so that `group`'s
// expected impact ratio there is target_ratio. Throws ConfigError when the
// group's expected ratio pooled over all positions would drop below 0.8.
SyntheticSpec plant_adverse_impact(SyntheticSpec spec, const std::string& group,
                                   std::span<const std::size_t> positions,
                                   double target_ratio);

// P(rejected by every model) for an applicant facing probit intercepts
// `intercepts` under correlation rho, by quadrature over the shared factor.
double expected_systemic_rejection(std::span<const double> intercepts, double rho);

void write_sim_scores(std::ostream& out, std::span<const SimScore> scores);

std::string padded_id(char prefix, std::size_t index, std::size_t count);

}  // namespace monoaudit

#endif  // MONOAUDIT_SYNTHGEN_H_
