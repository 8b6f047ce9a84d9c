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

#include "monoaudit/synthgen.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "monoaudit/csv.h"
#include "monoaudit/errors.h"
#include "monoaudit/rng.h"
#include "monoaudit/stats.h"

namespace monoaudit {
namespace {

constexpr std::uint64_t kTagTrait = 1;
constexpr std::uint64_t kTagNoise = 2;
constexpr double kAllRejectLatent = -5.0;

double hashed_normal(std::uint64_t seed, std::uint64_t tag, std::uint64_t i,
                     std::uint64_t j) {
  const std::uint64_t h =
      splitmix64(seed ^ splitmix64(tag ^ splitmix64(i ^ splitmix64(j))));
  const std::uint64_t h2 = splitmix64(h);
  const double u1 = static_cast<double>((h >> 11) + 1) * 0x1.0p-53;
  const double u2 = static_cast<double>(h2 >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Index drawn from a discrete distribution given as a map; the last key
// absorbs rounding.
template <typename Key>
std::optional<Key> draw(const std::map<Key, double>& dist, double u) {
  double acc = 0.0;
  for (const auto& [key, p] : dist) {
    acc += p;
    if (u < acc) return key;
  }
  return std::nullopt;
}

// k distinct values from [0, n), ascending (Floyd's algorithm).
std::vector<std::size_t> sample_distinct(std::mt19937_64& rng, std::size_t n,
                                         std::size_t k) {
  std::set<std::size_t> chosen;
  for (std::size_t j = n - k; j < n; ++j) {
    std::uniform_int_distribution<std::size_t> pick(0, j);
    const std::size_t t = pick(rng);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  return {chosen.begin(), chosen.end()};
}

double sum_of(const std::map<std::string, double>& m) {
  double s = 0.0;
  for (const auto& [_, p] : m) s += p;
  return s;
}

struct ApplicantPlan {
  std::optional<std::string> race;
  std::optional<std::string> gender;
  std::vector<std::size_t> positions;
  std::vector<Timestamp> times;
};

}  // namespace

std::string padded_id(char prefix, std::size_t index, std::size_t count) {
  std::size_t width = 1;
  for (std::size_t c = count; c > 10; c = (c + 9) / 10) ++width;
  std::string digits = std::to_string(index);
  if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
  return std::string(1, prefix) + digits;
}

double SyntheticSpec::base_rate(std::size_t model) const {
  return base_rates.empty() ? default_base_rate : base_rates.at(model);
}

void SyntheticSpec::validate() const {
  std::vector<std::string> problems;
  if (n_applicants == 0) problems.push_back("n_applicants must be positive");
  if (n_models == 0) problems.push_back("n_models must be positive");
  if (n_positions == 0) problems.push_back("n_positions must be positive");
  if (n_employers == 0) problems.push_back("n_employers must be positive");
  if (k_distribution.empty()) problems.push_back("k_distribution is empty");
  double k_total = 0.0;
  for (const auto& [k, p] : k_distribution) {
    if (k == 0) problems.push_back("k_distribution has k = 0");
    if (k > n_positions) {
      problems.push_back("k = " + std::to_string(k) + " exceeds n_positions");
    }
    if (!(p >= 0.0)) problems.push_back("k_distribution has a negative probability");
    k_total += p;
  }
  if (!k_distribution.empty() && std::abs(k_total - 1.0) > 1e-9) {
    problems.push_back("k_distribution sums to " + format_exact(k_total) + ", not 1");
  }
  if (!(rho >= 0.0 && rho <= 1.0)) problems.push_back("rho must lie in [0,1]");
  if (!base_rates.empty() && base_rates.size() != n_models) {
    problems.push_back("base_rates needs one entry per model");
  }
  for (double r : base_rates) {
    if (!(r > 0.0 && r < 1.0)) problems.push_back("base_rates must lie in (0,1)");
  }
  if (!(default_base_rate > 0.0 && default_base_rate < 1.0)) {
    problems.push_back("default_base_rate must lie in (0,1)");
  }
  for (const auto* mix : {&group_mix, &gender_mix}) {
    for (const auto& [_, p] : *mix) {
      if (!(p >= 0.0)) problems.push_back("mix probabilities must be non-negative");
    }
    if (sum_of(*mix) > 1.0 + 1e-9) problems.push_back("a mix sums to more than 1");
  }
  for (const auto& e : group_effects) {
    if (!group_mix.contains(e.group)) {
      problems.push_back("group effect for unknown group '" + e.group + "'");
    }
    if (e.model >= n_models) problems.push_back("group effect for unknown model");
  }
  if (planted.split_identities + sim_applicants > n_applicants) {
    problems.push_back("sim_applicants plus split_identities exceed n_applicants");
  }
  if (sim_incomplete > sim_applicants) {
    problems.push_back("sim_incomplete exceeds sim_applicants");
  }
  if (sim_applicants > 0 && planted.all_reject_applicants > sim_applicants) {
    problems.push_back("all_reject_applicants exceeds sim_applicants");
  }
  if (planted.all_reject_applicants + planted.split_identities > n_applicants) {
    problems.push_back("planted applicants exceed n_applicants");
  }
  if (planted.test_model_rows > 0 && planted.test_models == 0) {
    problems.push_back("test_model_rows needs test_models > 0");
  }
  if (antithetic && n_applicants % 2 != 0) {
    problems.push_back("antithetic pairs need an even n_applicants");
  }
  if (problems.empty()) return;
  std::string message = "invalid synthetic spec:";
  for (const auto& p : problems) message += "\n  " + p;
  throw ConfigError(message);
}

nlohmann::json SyntheticSpec::to_json() const {
  nlohmann::json k = nlohmann::json::object();
  for (const auto& [key, p] : k_distribution) k[std::to_string(key)] = p;
  nlohmann::json effects = nlohmann::json::array();
  for (const auto& e : group_effects) {
    effects.push_back({{"group", e.group}, {"model", e.model}, {"offset", e.offset}});
  }
  return {{"n_applicants", n_applicants},
          {"n_models", n_models},
          {"n_positions", n_positions},
          {"n_employers", n_employers},
          {"k_distribution", k},
          {"rho", rho},
          {"base_rates", base_rates},
          {"default_base_rate", default_base_rate},
          {"group_mix", group_mix},
          {"gender_mix", gender_mix},
          {"group_effects", effects},
          {"soc_groups", soc_groups},
          {"sim_applicants", sim_applicants},
          {"sim_incomplete", sim_incomplete},
          {"antithetic", antithetic},
          {"planted",
           {{"duplicates", planted.duplicates},
            {"test_models", planted.test_models},
            {"test_model_rows", planted.test_model_rows},
            {"unscored", planted.unscored},
            {"split_identities", planted.split_identities},
            {"all_reject_applicants", planted.all_reject_applicants}}},
          {"seed", seed}};
}

SyntheticSpec SyntheticSpec::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("synthetic spec must be a JSON object");
  static const std::set<std::string> known = {
      "n_applicants", "n_models",       "n_positions",    "n_employers",
      "k_distribution", "rho",          "base_rates",     "default_base_rate",
      "group_mix",    "gender_mix",     "group_effects",  "soc_groups",
      "sim_applicants", "sim_incomplete", "antithetic",   "planted",
      "seed"};
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw ConfigError("unknown spec field '" + key + "'");
  }
  SyntheticSpec s;
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) j.at(key).get_to(field);
    };
    get("n_applicants", s.n_applicants);
    get("n_models", s.n_models);
    get("n_positions", s.n_positions);
    get("n_employers", s.n_employers);
    if (j.contains("k_distribution")) {
      s.k_distribution.clear();
      for (const auto& [key, p] : j.at("k_distribution").items()) {
        const auto k = parse_integer(key);
        if (!k || *k < 0) throw ConfigError("bad k '" + key + "' in k_distribution");
        s.k_distribution[static_cast<std::size_t>(*k)] = p.get<double>();
      }
    }
    get("rho", s.rho);
    get("base_rates", s.base_rates);
    get("default_base_rate", s.default_base_rate);
    get("group_mix", s.group_mix);
    get("gender_mix", s.gender_mix);
    if (j.contains("group_effects")) {
      for (const auto& e : j.at("group_effects")) {
        s.group_effects.push_back({e.at("group").get<std::string>(),
                                   e.at("model").get<std::size_t>(),
                                   e.at("offset").get<double>()});
      }
    }
    get("soc_groups", s.soc_groups);
    get("sim_applicants", s.sim_applicants);
    get("sim_incomplete", s.sim_incomplete);
    get("antithetic", s.antithetic);
    if (j.contains("planted")) {
      const auto& p = j.at("planted");
      auto getp = [&](const char* key, std::size_t& field) {
        if (p.contains(key)) p.at(key).get_to(field);
      };
      getp("duplicates", s.planted.duplicates);
      getp("test_models", s.planted.test_models);
      getp("test_model_rows", s.planted.test_model_rows);
      getp("unscored", s.planted.unscored);
      getp("split_identities", s.planted.split_identities);
      getp("all_reject_applicants", s.planted.all_reject_applicants);
    }
    get("seed", s.seed);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("synthetic spec: ") + e.what());
  }
  return s;
}

SyntheticSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return SyntheticSpec::from_json(j);
}

Calibration calibrate(const SyntheticSpec& spec) {
  Calibration cal;
  std::map<std::string, std::vector<double>> offsets;
  for (const auto& [g, _] : spec.group_mix) offsets[g].assign(spec.n_models, 0.0);
  for (const auto& e : spec.group_effects) offsets.at(e.group).at(e.model) = e.offset;

  cal.group_rates[""].resize(spec.n_models);
  for (const auto& [g, _] : spec.group_mix) cal.group_rates[g].resize(spec.n_models);
  for (std::size_t j = 0; j < spec.n_models; ++j) {
    // The marginal rate is linear in the unlabelled rate r0.
    double shift = 0.0;
    for (const auto& [g, w] : spec.group_mix) shift += w * offsets[g][j];
    const double r0 = spec.base_rate(j) - shift;
    cal.group_rates[""][j] = r0;
    for (const auto& [g, _] : spec.group_mix) cal.group_rates[g][j] = r0 + offsets[g][j];
    for (const auto& [g, rates] : cal.group_rates) {
      if (!(rates[j] > 0.0 && rates[j] < 1.0)) {
        throw ConfigError("infeasible calibration: group '" + g + "' on model " +
                          std::to_string(j) + " would have rate " +
                          format_exact(rates[j]));
      }
    }
    cal.intercepts.push_back(normal_quantile(r0));
  }
  return cal;
}

nlohmann::json GroundTruth::to_json() const {
  nlohmann::json hist = nlohmann::json::object();
  for (const auto& [k, n] : k_histogram) hist[std::to_string(k)] = n;
  nlohmann::json adverse = nlohmann::json::array();
  for (const auto& [g, p] : planted_adverse) {
    adverse.push_back({{"group", g}, {"position_id", p}});
  }
  nlohmann::json rates = nlohmann::json::object();
  for (const auto& [g, r] : calibration.group_rates) {
    rates[g.empty() ? "(unlabelled)" : g] = r;
  }
  return {{"intercepts", calibration.intercepts},
          {"group_rates", rates},
          {"planned_k", planned_k},
          {"k_histogram", hist},
          {"latents", latents},
          {"duplicate_ids", duplicate_ids},
          {"unscored_ids", unscored_ids},
          {"test_model_ids", test_model_ids},
          {"test_model_rows", test_model_rows},
          {"all_reject_applicants", all_reject_applicants},
          {"identity_groups", identity_groups},
          {"planted_adverse", adverse},
          {"sim_applicants", sim_applicants}};
}

SyntheticCorpus generate(const SyntheticSpec& spec) {
  spec.validate();
  SyntheticCorpus corpus;
  GroundTruth& truth = corpus.truth;
  truth.calibration = calibrate(spec);
  const auto& cal = truth.calibration;

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Timestamp epoch = std::chrono::sys_days{std::chrono::year{2020} / 1 / 1};
  std::uniform_int_distribution<std::int64_t> second_of_year(0, 365LL * 86400 - 1);

  const std::size_t n = spec.n_applicants;
  std::vector<ApplicantPlan> plans(n);
  std::size_t base_rows = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (spec.antithetic && i % 2 == 1) {
      plans[i] = plans[i - 1];
      base_rows += plans[i].positions.size();
      continue;
    }
    auto& plan = plans[i];
    plan.race = draw(spec.group_mix, unit(rng));
    plan.gender = draw(spec.gender_mix, unit(rng));
    const std::size_t k = draw(spec.k_distribution, unit(rng))
                              .value_or(spec.k_distribution.rbegin()->first);
    plan.positions = sample_distinct(rng, spec.n_positions, k);
    std::shuffle(plan.positions.begin(), plan.positions.end(), rng);
    for (std::size_t a = 0; a < k; ++a) {
      plan.times.push_back(epoch + std::chrono::seconds(second_of_year(rng)));
    }
    base_rows += k;
  }

  const auto& planted = spec.planted;
  const std::size_t total_rows =
      base_rows + planted.duplicates + planted.test_model_rows + planted.unscored;
  std::vector<std::string> applicant_ids(n);
  for (std::size_t i = 0; i < n; ++i) applicant_ids[i] = padded_id('u', i, n);
  std::vector<std::string> model_ids(spec.n_models);
  for (std::size_t j = 0; j < spec.n_models; ++j) {
    model_ids[j] = padded_id('m', j, spec.n_models);
  }

  // Planted applicants: all-reject first, then split identities, disjoint.
  std::vector<std::size_t> special = sample_distinct(
      rng, n, planted.all_reject_applicants + planted.split_identities);
  std::shuffle(special.begin(), special.end(), rng);
  std::set<std::size_t> all_reject(special.begin(),
                                   special.begin() + planted.all_reject_applicants);
  std::set<std::size_t> split(special.begin() + planted.all_reject_applicants,
                              special.end());

  auto trait = [&](std::size_t i) {
    if (spec.antithetic && i % 2 == 1) return -hashed_normal(spec.seed, kTagTrait, i - 1, 0);
    return hashed_normal(spec.seed, kTagTrait, i, 0);
  };
  auto noise = [&](std::size_t i, std::size_t j) {
    if (spec.antithetic && i % 2 == 1) return -hashed_normal(spec.seed, kTagNoise, i - 1, j);
    return hashed_normal(spec.seed, kTagNoise, i, j);
  };
  const double rho = spec.rho;
  const double sigma = std::sqrt(std::max(0.0, 1.0 - rho * rho));
  // b_j + d_gj, the probit of the group's rate.
  std::map<std::string, std::vector<double>> shift;
  for (const auto& [g, rates] : cal.group_rates) {
    for (double r : rates) shift[g].push_back(normal_quantile(r));
  }
  auto score = [&](std::size_t i, std::size_t j) {
    if (all_reject.contains(i)) return logistic(kAllRejectLatent);
    const double b = shift.at(plans[i].race.value_or(""))[j];
    return logistic(rho * trait(i) + sigma * noise(i, j) + b);
  };

  std::vector<std::string> position_ids(spec.n_positions);
  for (std::size_t p = 0; p < spec.n_positions; ++p) {
    position_ids[p] = padded_id('p', p, spec.n_positions);
  }
  std::size_t next_row = 0;
  auto& records = corpus.records;
  records.reserve(total_rows);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& plan = plans[i];
    truth.planned_k[applicant_ids[i]] = plan.positions.size();
    ++truth.k_histogram[plan.positions.size()];
    truth.latents[applicant_ids[i]] = trait(i);
    if (split.contains(i)) truth.identity_groups[applicant_ids[i]] = plan.positions.size();
    for (std::size_t a = 0; a < plan.positions.size(); ++a) {
      const std::size_t p = plan.positions[a];
      const std::size_t j = p % spec.n_models;
      ApplicationRecord r;
      r.application_id = padded_id('a', next_row, total_rows);
      r.applicant_id = split.contains(i) ? padded_id('r', next_row, total_rows)
                                         : applicant_ids[i];
      r.position_id = position_ids[p];
      r.employer_id = padded_id('e', p % spec.n_employers, spec.n_employers);
      r.model_id = model_ids[j];
      r.score = score(i, j);
      r.submitted_at = plan.times[a];
      r.race = plan.race;
      r.gender = plan.gender;
      if (!spec.soc_groups.empty()) {
        const std::string& soc = spec.soc_groups[p % spec.soc_groups.size()];
        if (!soc.empty()) r.soc_major_group = soc;
      }
      if (planted.split_identities > 0) {
        r.extra["first_name"] = padded_id('F', i, n);
        r.extra["last_name"] = padded_id('L', i, n);
        r.extra["address"] = split.contains(i) ? padded_id('R', next_row, total_rows)
                                               : padded_id('A', i, n);
      }
      records.push_back(std::move(r));
      ++next_row;
    }
  }
  for (std::size_t i : all_reject) truth.all_reject_applicants.push_back(applicant_ids[i]);
  std::sort(truth.all_reject_applicants.begin(), truth.all_reject_applicants.end());

  std::uniform_int_distribution<std::size_t> any_row(0, base_rows - 1);
  for (std::size_t d = 0; d < planted.duplicates; ++d) {
    ApplicationRecord r = records[any_row(rng)];
    r.application_id = padded_id('a', next_row++, total_rows);
    r.submitted_at += std::chrono::days(1) + std::chrono::seconds(d);
    truth.duplicate_ids.push_back(r.application_id);
    records.push_back(std::move(r));
  }
  for (std::size_t t = 0; t < planted.test_models; ++t) {
    truth.test_model_ids.push_back("test_" + padded_id('m', t, planted.test_models));
  }
  for (std::size_t t = 0; t < planted.test_model_rows; ++t) {
    ApplicationRecord r = records[any_row(rng)];
    r.application_id = padded_id('a', next_row++, total_rows);
    r.model_id = truth.test_model_ids[t % planted.test_models];
    records.push_back(std::move(r));
  }
  truth.test_model_rows = planted.test_model_rows;
  for (std::size_t u = 0; u < planted.unscored; ++u) {
    ApplicationRecord r = records[any_row(rng)];
    r.application_id = padded_id('a', next_row++, total_rows);
    r.score.reset();
    truth.unscored_ids.push_back(r.application_id);
    records.push_back(std::move(r));
  }

  // Expected flags: a group whose expected rate on a position's model is
  // below four fifths of the best labelled group's rate.
  for (std::size_t p = 0; p < spec.n_positions; ++p) {
    const std::size_t j = p % spec.n_models;
    double best = 0.0;
    for (const auto& [g, _] : spec.group_mix) best = std::max(best, cal.group_rates.at(g)[j]);
    for (const auto& [g, _] : spec.group_mix) {
      if (cal.group_rates.at(g)[j] < 0.8 * best) {
        truth.planted_adverse.emplace_back(g, position_ids[p]);
      }
    }
  }

  if (spec.sim_applicants > 0) {
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < n; ++i) {
      if (!all_reject.contains(i) && !split.contains(i)) pool.push_back(i);
    }
    std::vector<std::size_t> sim(all_reject.begin(), all_reject.end());
    for (std::size_t idx :
         sample_distinct(rng, pool.size(), spec.sim_applicants - sim.size())) {
      sim.push_back(pool[idx]);
    }
    std::sort(sim.begin(), sim.end());
    std::set<std::size_t> incomplete;
    for (std::size_t idx : sample_distinct(rng, sim.size(), spec.sim_incomplete)) {
      incomplete.insert(sim[idx]);
    }
    std::uniform_int_distribution<std::size_t> any_model(0, spec.n_models - 1);
    for (std::size_t i : sim) {
      truth.sim_applicants.push_back(applicant_ids[i]);
      const std::size_t blank = incomplete.contains(i) ? any_model(rng) : spec.n_models;
      for (std::size_t j = 0; j < spec.n_models; ++j) {
        SimScore s{applicant_ids[i], model_ids[j], std::nullopt};
        if (j != blank) s.score = score(i, j);
        corpus.sim_scores.push_back(std::move(s));
      }
    }
  }
  return corpus;
}

SyntheticSpec plant_adverse_impact(SyntheticSpec spec, const std::string& group,
                                   std::span<const std::size_t> positions,
                                   double target_ratio) {
  if (!(target_ratio > 0.0 && target_ratio <= 1.0)) {
    throw ConfigError("target_ratio must lie in (0,1]");
  }
  if (!spec.group_mix.contains(group)) {
    throw ConfigError("group '" + group + "' is not in group_mix");
  }
  std::set<std::size_t> models;
  for (std::size_t p : positions) {
    if (p >= spec.n_positions) throw ConfigError("position index out of range");
    models.insert(p % spec.n_models);
  }
  const double w_g = spec.group_mix.at(group);
  for (std::size_t j : models) {
    std::erase_if(spec.group_effects, [&](const GroupEffect& e) {
      return e.group == group && e.model == j;
    });
    // With the other groups' offsets fixed, r_g = tau * max_h r_h is linear
    // in the planted offset.
    double others = 0.0;
    double top = 0.0;
    bool any_other = false;
    for (const auto& [h, w] : spec.group_mix) {
      if (h == group) continue;
      double off = 0.0;
      for (const auto& e : spec.group_effects) {
        if (e.group == h && e.model == j) off = e.offset;
      }
      others += w * off;
      top = any_other ? std::max(top, off) : off;
      any_other = true;
    }
    if (!any_other) throw ConfigError("planting needs a second group");
    const double base = spec.base_rate(j) - others;
    const double offset =
        ((target_ratio - 1.0) * base + target_ratio * top) /
        (1.0 + (target_ratio - 1.0) * w_g);
    spec.group_effects.push_back({group, j, offset});
  }
  const Calibration cal = calibrate(spec);

  // Expected rates pooled over positions, each position equally likely.
  std::map<std::string, double> pooled;
  for (const auto& [h, _] : spec.group_mix) {
    double s = 0.0;
    for (std::size_t p = 0; p < spec.n_positions; ++p) {
      s += cal.group_rates.at(h)[p % spec.n_models];
    }
    pooled[h] = s / static_cast<double>(spec.n_positions);
  }
  double best = 0.0;
  for (const auto& [_, r] : pooled) best = std::max(best, r);
  if (pooled.at(group) < 0.8 * best) {
    throw ConfigError("planting would flag '" + group + "' in aggregate (ratio " +
                      format_exact(pooled.at(group) / best) + ")");
  }
  return spec;
}

double expected_systemic_rejection(std::span<const double> intercepts, double rho) {
  if (intercepts.empty()) return 1.0;
  const double top = *std::max_element(intercepts.begin(), intercepts.end());
  if (rho >= 1.0) return normal_cdf(-top);
  const double sigma = std::sqrt(1.0 - rho * rho);
  // Composite Simpson on [-10, 10].
  constexpr int kIntervals = 4000;
  constexpr double lo = -10.0;
  constexpr double h = 20.0 / kIntervals;
  double total = 0.0;
  for (int s = 0; s <= kIntervals; ++s) {
    const double a = lo + h * s;
    double f = std::exp(-0.5 * a * a) / std::sqrt(2.0 * std::numbers::pi);
    for (double c : intercepts) f *= normal_cdf(-(rho * a + c) / sigma);
    const double weight = (s == 0 || s == kIntervals) ? 1.0 : (s % 2 == 1 ? 4.0 : 2.0);
    total += weight * f;
  }
  return total * h / 3.0;
}

void write_sim_scores(std::ostream& out, std::span<const SimScore> scores) {
  write_csv_row(out, {"applicant_id", "model_id", "score"});
  for (const auto& s : scores) {
    write_csv_row(out, {s.applicant_id, s.model_id,
                        s.score ? format_exact(*s.score) : std::string()});
  }
}

}  // namespace monoaudit
