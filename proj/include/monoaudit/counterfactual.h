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

#ifndef MONOAUDIT_COUNTERFACTUAL_H_
#define MONOAUDIT_COUNTERFACTUAL_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "monoaudit/dataset.h"

namespace monoaudit {

class BinaryMatrix;

// Compressed-row binary matrix; column indices in each row are sorted and
// unique.
class SparseBinaryMatrix {
 public:
  SparseBinaryMatrix() = default;
  SparseBinaryMatrix(std::size_t rows, std::size_t cols,
                     std::vector<std::vector<std::uint32_t>> row_entries);

  static SparseBinaryMatrix from_dense(const BinaryMatrix& dense);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return col_idx_.size(); }
  std::span<const std::uint32_t> row(std::size_t i) const;
  bool contains(std::size_t i, std::size_t j) const;
  SparseBinaryMatrix transpose() const;
  BinaryMatrix to_dense() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_ = {0};
  std::vector<std::uint32_t> col_idx_;
};

class BinaryMatrix {
 public:
  BinaryMatrix() = default;
  BinaryMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j] != 0; }
  void set(std::size_t i, std::size_t j, bool v = true) {
    data_[i * cols_ + j] = v ? 1 : 0;
  }
  std::size_t row_sum(std::size_t i) const;

  bool operator==(const BinaryMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint8_t> data_;
};

// Model x model co-application counts, B = A^T A, stored sparsely.
class OverlapMatrix {
 public:
  OverlapMatrix() = default;
  std::size_t size() const { return size_; }
  std::uint64_t at(std::size_t i, std::size_t j) const;
  // Nonzero columns of row i with their counts.
  std::span<const std::uint32_t> row_columns(std::size_t i) const;
  std::span<const std::uint64_t> row_values(std::size_t i) const;
  std::size_t nnz() const { return cols_.size(); }

  // Rows/columns `keep`, in that order.
  OverlapMatrix select(std::span<const std::size_t> keep) const;

  friend OverlapMatrix overlap(const SparseBinaryMatrix& a);

 private:
  std::size_t size_ = 0;
  std::vector<std::size_t> row_ptr_ = {0};
  std::vector<std::uint32_t> cols_;
  std::vector<std::uint64_t> values_;
};

// B = A^T A by row-wise accumulation over the columns of A.
OverlapMatrix overlap(const SparseBinaryMatrix& a);

// Applicant x model incidence; rows and columns sorted by id.
struct ApplicationMatrix {
  std::vector<std::string> applicant_ids;
  std::vector<std::string> model_ids;
  SparseBinaryMatrix incidence;

  std::optional<std::size_t> applicant_index(const std::string& id) const;
  std::optional<std::size_t> model_index(const std::string& id) const;

  // Rows for `applicants` and columns for `models`, in the given order.
  // Unknown ids give empty rows or columns.
  SparseBinaryMatrix select(std::span<const std::string> applicants,
                            std::span<const std::string> models) const;
};

struct Matrices {
  ApplicationMatrix applications;
  OverlapMatrix overlap;
};

// A from the distinct (applicant, model) pairs in the records, and B = A^T A.
Matrices build_matrices(std::span<const ApplicationRecord> records);

struct SharedModel {
  std::string model_id;
  std::vector<std::string> employers;  // sorted, size >= 2
};

// Models that serve positions at two or more employers.
std::vector<SharedModel> shared_models(std::span<const ApplicationRecord> records);
// Distinct employer pairs sharing at least one model.
std::size_t employer_pairs_sharing_models(std::span<const SharedModel> shared);

// A'[i,j] = 1 iff sum_l A[i,l] B[l,j] > 0: applicant i applied to some model
// that shares an applicant with model j. One hop only. Throws
// std::invalid_argument when A's columns and B's size disagree.
BinaryMatrix connected_expand(const SparseBinaryMatrix& a_sub,
                              const OverlapMatrix& b_sub);

// Outcome of every sampled applicant under every simulated model. Entries
// that could not be simulated hold -1.
struct SimOutcomeMatrix {
  std::vector<std::string> applicant_ids;
  std::vector<std::string> model_ids;
  std::vector<std::int8_t> outcomes;  // row-major

  std::size_t rows() const { return applicant_ids.size(); }
  std::size_t cols() const { return model_ids.size(); }
  std::int8_t at(std::size_t i, std::size_t j) const { return outcomes[i * cols() + j]; }
  bool row_complete(std::size_t i) const;

  // Drops incomplete rows; `excluded` receives how many were dropped.
  SimOutcomeMatrix complete_rows(std::size_t* excluded = nullptr) const;
};

// Long format: applicant_id,model_id,score. An empty score marks a pair that
// could not be simulated; pairs absent from the file are missing too.
SimOutcomeMatrix parse_sim_outcomes(std::istream& in, double threshold = 0.5);
SimOutcomeMatrix load_sim_outcomes(const std::filesystem::path& path,
                                   double threshold = 0.5);

struct SimulationResult {
  std::size_t k = 0;
  std::size_t n_applicants_retained = 0;
  std::size_t n_applicants_discarded = 0;
  double systemic_rejection_mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  // Mean over replicates of the applicants' products of (1 - s_j) over the
  // sampled models, s_j being the simulated selection rate of model j.
  double baseline_rate = 0.0;
  std::size_t replicates = 0;
  std::vector<double> replicate_rates;

  nlohmann::json to_json() const;
};

inline constexpr std::size_t kDefaultReplicates = 100;

// Seed for replicate `replicate` at sample size `k`.
std::uint64_t child_seed(std::uint64_t master_seed, std::size_t replicate,
                         std::size_t k);

// For each replicate, every applicant whose row of `expanded` has at least k
// ones gets k of those models drawn uniformly without replacement; the
// systemic rejection rate is the share with no recommendation among them.
// The CI is the 2.5/97.5 percentile band over replicates. `outcomes` must be
// aligned with `expanded` and defined on its support. Throws
// InsufficientData when no applicant has k models.
SimulationResult sample_and_score(const BinaryMatrix& expanded,
                                  const SimOutcomeMatrix& outcomes, std::size_t k,
                                  std::size_t replicates, std::uint64_t master_seed);

// Runs sample_and_score for each k, skipping k with an empty cohort.
std::vector<SimulationResult> simulate_curve(const BinaryMatrix& expanded,
                                             const SimOutcomeMatrix& outcomes,
                                             std::size_t k_min, std::size_t k_max,
                                             std::size_t replicates,
                                             std::uint64_t master_seed);

// Smallest k whose simulated (or baseline) rate is below `threshold`.
std::optional<std::size_t> first_k_below(std::span<const SimulationResult> curve,
                                         double threshold, bool use_baseline);

struct FloorReport {
  std::size_t n_applicants = 0;
  std::size_t n_models = 0;
  std::size_t excluded_incomplete = 0;
  std::vector<std::size_t> recommendations;  // per complete applicant
  std::size_t min_recommendations = 0;
  double min_fraction = 0.0;
  // Applicants recommended by no simulated model.
  std::size_t zero_floor_applicants = 0;
  std::map<std::size_t, std::size_t> histogram;

  nlohmann::json to_json() const;
};

// Recommendations each applicant would receive from every simulated model.
FloorReport exhaustive_recommendation_floor(const SimOutcomeMatrix& outcomes);

// Everything the simulation needs, aligned on the complete rows of O_sim.
struct SimulationSetup {
  SimOutcomeMatrix outcomes;
  SparseBinaryMatrix observed;  // A_sim
  BinaryMatrix expanded;        // A'_sim
  std::size_t excluded_incomplete = 0;
  std::size_t unknown_applicants = 0;  // simulated but absent from the records
};

SimulationSetup prepare_simulation(std::span<const ApplicationRecord> records,
                                   const SimOutcomeMatrix& outcomes);

}  // namespace monoaudit

#endif  // MONOAUDIT_COUNTERFACTUAL_H_
