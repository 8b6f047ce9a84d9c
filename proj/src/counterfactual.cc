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

#include "monoaudit/counterfactual.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <utility>

#include "monoaudit/csv.h"
#include "monoaudit/errors.h"
#include "monoaudit/rng.h"

namespace monoaudit {
namespace {

constexpr std::size_t kAbsent = static_cast<std::size_t>(-1);

// Linear interpolation between order statistics.
double percentile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  const double h = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::optional<std::size_t> index_in(const std::vector<std::string>& sorted,
                                    const std::string& id) {
  const auto it = std::lower_bound(sorted.begin(), sorted.end(), id);
  if (it == sorted.end() || *it != id) return std::nullopt;
  return static_cast<std::size_t>(it - sorted.begin());
}

}  // namespace

SparseBinaryMatrix::SparseBinaryMatrix(
    std::size_t rows, std::size_t cols,
    std::vector<std::vector<std::uint32_t>> row_entries)
    : rows_(rows), cols_(cols) {
  if (row_entries.size() != rows) {
    throw std::invalid_argument("row count does not match row entries");
  }
  row_ptr_.assign(1, 0);
  row_ptr_.reserve(rows + 1);
  for (auto& entries : row_entries) {
    std::sort(entries.begin(), entries.end());
    entries.erase(std::unique(entries.begin(), entries.end()), entries.end());
    for (auto j : entries) {
      if (j >= cols) throw std::out_of_range("column index out of range");
      col_idx_.push_back(j);
    }
    row_ptr_.push_back(col_idx_.size());
  }
}

SparseBinaryMatrix SparseBinaryMatrix::from_dense(const BinaryMatrix& dense) {
  std::vector<std::vector<std::uint32_t>> rows(dense.rows());
  for (std::size_t i = 0; i < dense.rows(); ++i) {
    for (std::size_t j = 0; j < dense.cols(); ++j) {
      if (dense.at(i, j)) rows[i].push_back(static_cast<std::uint32_t>(j));
    }
  }
  return SparseBinaryMatrix(dense.rows(), dense.cols(), std::move(rows));
}

std::span<const std::uint32_t> SparseBinaryMatrix::row(std::size_t i) const {
  return std::span<const std::uint32_t>(col_idx_).subspan(
      row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]);
}

bool SparseBinaryMatrix::contains(std::size_t i, std::size_t j) const {
  const auto r = row(i);
  return std::binary_search(r.begin(), r.end(), static_cast<std::uint32_t>(j));
}

SparseBinaryMatrix SparseBinaryMatrix::transpose() const {
  std::vector<std::vector<std::uint32_t>> t(cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (auto j : row(i)) t[j].push_back(static_cast<std::uint32_t>(i));
  }
  return SparseBinaryMatrix(cols_, rows_, std::move(t));
}

BinaryMatrix SparseBinaryMatrix::to_dense() const {
  BinaryMatrix d(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (auto j : row(i)) d.set(i, j);
  }
  return d;
}

std::size_t BinaryMatrix::row_sum(std::size_t i) const {
  std::size_t s = 0;
  for (std::size_t j = 0; j < cols_; ++j) s += data_[i * cols_ + j];
  return s;
}

std::uint64_t OverlapMatrix::at(std::size_t i, std::size_t j) const {
  const auto cols = row_columns(i);
  const auto it = std::lower_bound(cols.begin(), cols.end(),
                                   static_cast<std::uint32_t>(j));
  if (it == cols.end() || *it != j) return 0;
  return row_values(i)[static_cast<std::size_t>(it - cols.begin())];
}

std::span<const std::uint32_t> OverlapMatrix::row_columns(std::size_t i) const {
  return std::span<const std::uint32_t>(cols_).subspan(row_ptr_[i],
                                                       row_ptr_[i + 1] - row_ptr_[i]);
}

std::span<const std::uint64_t> OverlapMatrix::row_values(std::size_t i) const {
  return std::span<const std::uint64_t>(values_).subspan(row_ptr_[i],
                                                         row_ptr_[i + 1] - row_ptr_[i]);
}

OverlapMatrix OverlapMatrix::select(std::span<const std::size_t> keep) const {
  std::unordered_map<std::size_t, std::uint32_t> new_index;
  for (std::size_t n = 0; n < keep.size(); ++n) {
    if (keep[n] == kAbsent) continue;
    if (keep[n] >= size_) throw std::out_of_range("overlap row out of range");
    new_index.emplace(keep[n], static_cast<std::uint32_t>(n));
  }
  OverlapMatrix out;
  out.size_ = keep.size();
  std::vector<std::pair<std::uint32_t, std::uint64_t>> row;
  for (std::size_t old : keep) {
    row.clear();
    if (old != kAbsent) {
      const auto cols = row_columns(old);
      const auto vals = row_values(old);
      for (std::size_t e = 0; e < cols.size(); ++e) {
        const auto it = new_index.find(cols[e]);
        if (it != new_index.end()) row.emplace_back(it->second, vals[e]);
      }
      std::sort(row.begin(), row.end());
    }
    for (const auto& [c, v] : row) {
      out.cols_.push_back(c);
      out.values_.push_back(v);
    }
    out.row_ptr_.push_back(out.cols_.size());
  }
  return out;
}

OverlapMatrix overlap(const SparseBinaryMatrix& a) {
  const SparseBinaryMatrix at = a.transpose();
  OverlapMatrix b;
  b.size_ = a.cols();
  std::vector<std::uint64_t> acc(a.cols(), 0);
  std::vector<std::uint32_t> touched;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    touched.clear();
    for (auto i : at.row(j)) {
      for (auto l : a.row(i)) {
        if (acc[l]++ == 0) touched.push_back(l);
      }
    }
    std::sort(touched.begin(), touched.end());
    for (auto l : touched) {
      b.cols_.push_back(l);
      b.values_.push_back(acc[l]);
      acc[l] = 0;
    }
    b.row_ptr_.push_back(b.cols_.size());
  }
  return b;
}

std::optional<std::size_t> ApplicationMatrix::applicant_index(const std::string& id) const {
  return index_in(applicant_ids, id);
}

std::optional<std::size_t> ApplicationMatrix::model_index(const std::string& id) const {
  return index_in(model_ids, id);
}

SparseBinaryMatrix ApplicationMatrix::select(std::span<const std::string> applicants,
                                             std::span<const std::string> models) const {
  std::unordered_map<std::size_t, std::uint32_t> col_map;
  for (std::size_t n = 0; n < models.size(); ++n) {
    if (auto idx = model_index(models[n])) {
      col_map.emplace(*idx, static_cast<std::uint32_t>(n));
    }
  }
  std::vector<std::vector<std::uint32_t>> rows(applicants.size());
  for (std::size_t r = 0; r < applicants.size(); ++r) {
    const auto idx = applicant_index(applicants[r]);
    if (!idx) continue;
    for (auto j : incidence.row(*idx)) {
      const auto it = col_map.find(j);
      if (it != col_map.end()) rows[r].push_back(it->second);
    }
  }
  return SparseBinaryMatrix(applicants.size(), models.size(), std::move(rows));
}

Matrices build_matrices(std::span<const ApplicationRecord> records) {
  Matrices m;
  auto& apps = m.applications;
  std::set<std::string> applicants;
  std::set<std::string> models;
  for (const auto& r : records) {
    applicants.insert(r.applicant_id);
    models.insert(r.model_id);
  }
  apps.applicant_ids.assign(applicants.begin(), applicants.end());
  apps.model_ids.assign(models.begin(), models.end());
  std::vector<std::vector<std::uint32_t>> rows(apps.applicant_ids.size());
  for (const auto& r : records) {
    rows[*apps.applicant_index(r.applicant_id)].push_back(
        static_cast<std::uint32_t>(*apps.model_index(r.model_id)));
  }
  apps.incidence = SparseBinaryMatrix(apps.applicant_ids.size(),
                                      apps.model_ids.size(), std::move(rows));
  m.overlap = overlap(apps.incidence);
  return m;
}

std::vector<SharedModel> shared_models(std::span<const ApplicationRecord> records) {
  std::map<std::string, std::set<std::string>> employers;
  for (const auto& r : records) employers[r.model_id].insert(r.employer_id);
  std::vector<SharedModel> out;
  for (const auto& [model, emps] : employers) {
    if (emps.size() >= 2) out.push_back({model, {emps.begin(), emps.end()}});
  }
  return out;
}

std::size_t employer_pairs_sharing_models(std::span<const SharedModel> shared) {
  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto& s : shared) {
    for (std::size_t a = 0; a < s.employers.size(); ++a) {
      for (std::size_t b = a + 1; b < s.employers.size(); ++b) {
        pairs.emplace(s.employers[a], s.employers[b]);
      }
    }
  }
  return pairs.size();
}

BinaryMatrix connected_expand(const SparseBinaryMatrix& a_sub,
                              const OverlapMatrix& b_sub) {
  if (a_sub.cols() != b_sub.size()) {
    throw std::invalid_argument("A has " + std::to_string(a_sub.cols()) +
                                " columns but B is " + std::to_string(b_sub.size()) +
                                " square");
  }
  BinaryMatrix out(a_sub.rows(), a_sub.cols());
  for (std::size_t i = 0; i < a_sub.rows(); ++i) {
    for (auto l : a_sub.row(i)) {
      const auto cols = b_sub.row_columns(l);
      const auto vals = b_sub.row_values(l);
      for (std::size_t e = 0; e < cols.size(); ++e) {
        if (vals[e] > 0) out.set(i, cols[e]);
      }
    }
  }
  return out;
}

bool SimOutcomeMatrix::row_complete(std::size_t i) const {
  for (std::size_t j = 0; j < cols(); ++j) {
    if (at(i, j) < 0) return false;
  }
  return true;
}

SimOutcomeMatrix SimOutcomeMatrix::complete_rows(std::size_t* excluded) const {
  SimOutcomeMatrix out;
  out.model_ids = model_ids;
  std::size_t dropped = 0;
  for (std::size_t i = 0; i < rows(); ++i) {
    if (!row_complete(i)) {
      ++dropped;
      continue;
    }
    out.applicant_ids.push_back(applicant_ids[i]);
    out.outcomes.insert(out.outcomes.end(), outcomes.begin() + i * cols(),
                        outcomes.begin() + (i + 1) * cols());
  }
  if (excluded != nullptr) *excluded = dropped;
  return out;
}

SimOutcomeMatrix parse_sim_outcomes(std::istream& in, double threshold) {
  CsvReader reader(in);
  const auto header = reader.next();
  if (!header) throw DataError("empty simulated outcome file");
  std::optional<std::size_t> c_applicant, c_model, c_score;
  for (std::size_t i = 0; i < header->size(); ++i) {
    if ((*header)[i] == "applicant_id") c_applicant = i;
    if ((*header)[i] == "model_id") c_model = i;
    if ((*header)[i] == "score") c_score = i;
  }
  if (!c_applicant || !c_model || !c_score) {
    throw DataError("simulated outcomes need applicant_id, model_id, score", 1);
  }
  struct Entry {
    std::string applicant;
    std::string model;
    std::int8_t outcome;
    std::size_t line;
  };
  std::vector<Entry> entries;
  std::set<std::string> applicants;
  std::set<std::string> models;
  while (auto row = reader.next()) {
    if (row->size() == 1 && row->front().empty()) continue;
    if (row->size() != header->size()) {
      throw DataError("wrong number of fields", reader.line());
    }
    std::int8_t outcome = -1;
    const std::string& text = (*row)[*c_score];
    if (!text.empty()) {
      const auto score = parse_double(text);
      if (!score || *score < 0.0 || *score > 1.0) {
        throw DataError("bad score '" + text + "'", reader.line());
      }
      outcome = *score > threshold ? 1 : 0;
    }
    applicants.insert((*row)[*c_applicant]);
    models.insert((*row)[*c_model]);
    entries.push_back({(*row)[*c_applicant], (*row)[*c_model], outcome, reader.line()});
  }
  SimOutcomeMatrix m;
  m.applicant_ids.assign(applicants.begin(), applicants.end());
  m.model_ids.assign(models.begin(), models.end());
  m.outcomes.assign(m.rows() * m.cols(), -1);
  std::vector<bool> seen(m.outcomes.size(), false);
  for (const auto& e : entries) {
    const std::size_t cell = *index_in(m.applicant_ids, e.applicant) * m.cols() +
                             *index_in(m.model_ids, e.model);
    if (seen[cell]) {
      throw DataError("duplicate outcome for " + e.applicant + "/" + e.model, e.line);
    }
    seen[cell] = true;
    m.outcomes[cell] = e.outcome;
  }
  return m;
}

SimOutcomeMatrix load_sim_outcomes(const std::filesystem::path& path, double threshold) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return parse_sim_outcomes(in, threshold);
}

nlohmann::json SimulationResult::to_json() const {
  return {{"k", k},
          {"n_applicants_retained", n_applicants_retained},
          {"n_applicants_discarded", n_applicants_discarded},
          {"systemic_rejection_mean", systemic_rejection_mean},
          {"ci_low", ci_low},
          {"ci_high", ci_high},
          {"baseline_rate", baseline_rate},
          {"replicates", replicates}};
}

std::uint64_t child_seed(std::uint64_t master_seed, std::size_t replicate,
                         std::size_t k) {
  std::uint64_t s = splitmix64(master_seed);
  s = splitmix64(s ^ (0xd1b54a32d192ed03ULL * (static_cast<std::uint64_t>(replicate) + 1)));
  s = splitmix64(s ^ (0x8cb92ba72f3d8dd7ULL * (static_cast<std::uint64_t>(k) + 1)));
  return s;
}

SimulationResult sample_and_score(const BinaryMatrix& expanded,
                                  const SimOutcomeMatrix& outcomes, std::size_t k,
                                  std::size_t replicates, std::uint64_t master_seed) {
  if (k == 0) throw std::invalid_argument("k must be at least 1");
  if (replicates == 0) throw std::invalid_argument("replicates must be at least 1");
  if (expanded.rows() != outcomes.rows() || expanded.cols() != outcomes.cols()) {
    throw std::invalid_argument("expanded matrix and outcomes are not aligned");
  }

  // Simulated selection rate per model over rows with a defined outcome.
  std::vector<double> rate(outcomes.cols(), 0.0);
  for (std::size_t j = 0; j < outcomes.cols(); ++j) {
    std::size_t n = 0;
    std::size_t sel = 0;
    for (std::size_t i = 0; i < outcomes.rows(); ++i) {
      const auto o = outcomes.at(i, j);
      if (o < 0) continue;
      ++n;
      sel += static_cast<std::size_t>(o);
    }
    rate[j] = n == 0 ? 0.0 : static_cast<double>(sel) / static_cast<double>(n);
  }

  std::vector<std::vector<std::uint32_t>> support;
  std::vector<std::size_t> row_of;
  for (std::size_t i = 0; i < expanded.rows(); ++i) {
    std::vector<std::uint32_t> cols;
    for (std::size_t j = 0; j < expanded.cols(); ++j) {
      if (!expanded.at(i, j)) continue;
      if (outcomes.at(i, j) < 0) {
        throw std::invalid_argument("no simulated outcome for " +
                                    outcomes.applicant_ids[i] + "/" +
                                    outcomes.model_ids[j]);
      }
      cols.push_back(static_cast<std::uint32_t>(j));
    }
    if (cols.size() >= k) {
      support.push_back(std::move(cols));
      row_of.push_back(i);
    }
  }

  SimulationResult result;
  result.k = k;
  result.replicates = replicates;
  result.n_applicants_retained = support.size();
  result.n_applicants_discarded = expanded.rows() - support.size();
  if (support.empty()) {
    throw InsufficientData("no applicant is connected to " + std::to_string(k) +
                           " models");
  }
  // The partial shuffles permute each support row in place; every replicate
  // draws from its own seed, so only the seed fixes the sample.

  const double n = static_cast<double>(support.size());
  double baseline_sum = 0.0;
  for (std::size_t rep = 0; rep < replicates; ++rep) {
    std::mt19937_64 rng(child_seed(master_seed, rep, k));
    std::size_t rejected = 0;
    double baseline = 0.0;
    for (std::size_t a = 0; a < support.size(); ++a) {
      auto& cols = support[a];
      bool any = false;
      double all_reject = 1.0;
      for (std::size_t s = 0; s < k; ++s) {
        std::uniform_int_distribution<std::size_t> pick(s, cols.size() - 1);
        std::swap(cols[s], cols[pick(rng)]);
        any = any || outcomes.at(row_of[a], cols[s]) == 1;
        all_reject *= 1.0 - rate[cols[s]];
      }
      if (!any) ++rejected;
      baseline += all_reject;
    }
    result.replicate_rates.push_back(static_cast<double>(rejected) / n);
    baseline_sum += baseline / n;
  }
  double total = 0.0;
  for (double r : result.replicate_rates) total += r;
  result.systemic_rejection_mean = total / static_cast<double>(replicates);
  result.ci_low = percentile(result.replicate_rates, 0.025);
  result.ci_high = percentile(result.replicate_rates, 0.975);
  // Interpolated percentiles can sit a rounding error away from the mean.
  result.ci_low = std::min(result.ci_low, result.systemic_rejection_mean);
  result.ci_high = std::max(result.ci_high, result.systemic_rejection_mean);
  result.baseline_rate = baseline_sum / static_cast<double>(replicates);
  return result;
}

std::vector<SimulationResult> simulate_curve(const BinaryMatrix& expanded,
                                             const SimOutcomeMatrix& outcomes,
                                             std::size_t k_min, std::size_t k_max,
                                             std::size_t replicates,
                                             std::uint64_t master_seed) {
  std::vector<SimulationResult> curve;
  for (std::size_t k = std::max<std::size_t>(1, k_min); k <= k_max; ++k) {
    try {
      curve.push_back(sample_and_score(expanded, outcomes, k, replicates, master_seed));
    } catch (const InsufficientData&) {
    }
  }
  return curve;
}

std::optional<std::size_t> first_k_below(std::span<const SimulationResult> curve,
                                         double threshold, bool use_baseline) {
  for (const auto& r : curve) {
    const double v = use_baseline ? r.baseline_rate : r.systemic_rejection_mean;
    if (v < threshold) return r.k;
  }
  return std::nullopt;
}

nlohmann::json FloorReport::to_json() const {
  nlohmann::json hist = nlohmann::json::array();
  for (const auto& [count, applicants] : histogram) {
    hist.push_back({{"recommendations", count}, {"applicants", applicants}});
  }
  return {{"n_applicants", n_applicants},
          {"n_models", n_models},
          {"excluded_incomplete", excluded_incomplete},
          {"min_recommendations", min_recommendations},
          {"min_fraction", min_fraction},
          {"zero_floor_applicants", zero_floor_applicants},
          {"histogram", hist}};
}

FloorReport exhaustive_recommendation_floor(const SimOutcomeMatrix& outcomes) {
  FloorReport report;
  const SimOutcomeMatrix complete = outcomes.complete_rows(&report.excluded_incomplete);
  report.n_applicants = complete.rows();
  report.n_models = complete.cols();
  for (std::size_t i = 0; i < complete.rows(); ++i) {
    std::size_t count = 0;
    for (std::size_t j = 0; j < complete.cols(); ++j) count += complete.at(i, j) == 1;
    report.recommendations.push_back(count);
    ++report.histogram[count];
    if (count == 0) ++report.zero_floor_applicants;
  }
  if (!report.recommendations.empty()) {
    report.min_recommendations =
        *std::min_element(report.recommendations.begin(), report.recommendations.end());
    report.min_fraction = report.n_models == 0
                              ? 0.0
                              : static_cast<double>(report.min_recommendations) /
                                    static_cast<double>(report.n_models);
  }
  return report;
}

SimulationSetup prepare_simulation(std::span<const ApplicationRecord> records,
                                   const SimOutcomeMatrix& outcomes) {
  SimulationSetup setup;
  setup.outcomes = outcomes.complete_rows(&setup.excluded_incomplete);
  const Matrices m = build_matrices(records);
  for (const auto& id : setup.outcomes.applicant_ids) {
    if (!m.applications.applicant_index(id)) ++setup.unknown_applicants;
  }
  setup.observed = m.applications.select(setup.outcomes.applicant_ids,
                                         setup.outcomes.model_ids);
  std::vector<std::size_t> keep;
  for (const auto& id : setup.outcomes.model_ids) {
    keep.push_back(m.applications.model_index(id).value_or(kAbsent));
  }
  setup.expanded = connected_expand(setup.observed, m.overlap.select(keep));
  return setup;
}

}  // namespace monoaudit
